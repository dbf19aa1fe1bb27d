#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <json.hpp>

#include "kgsmile/embedding.hpp"
#include "kgsmile/error.hpp"
#include "local_server.hpp"

using namespace kgsmile;

namespace {

// Reference FNV-1a 64 written from the published parameters.
std::uint64_t fnv_reference(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

TEST_CASE("fnv1a64 matches the reference and known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  for (const char* s : {"insulin", "glucose", "x", "neurofibrillary"}) CHECK(fnv1a64(s) == fnv_reference(s));
}

TEST_CASE("tokenize lowercases and splits on non-alphanumerics") {
  const auto t = tokenize("Glucose-binding, TCF7L2!  ok");
  REQUIRE(t.size() == 4);
  CHECK(t[0] == "glucose");
  CHECK(t[1] == "binding");
  CHECK(t[2] == "tcf7l2");
  CHECK(t[3] == "ok");
  CHECK(tokenize("  --  ").empty());
}

TEST_CASE("hashing embedder") {
  HashingEmbedder emb(256);
  SUBCASE("empty input is the zero vector") {
    const auto v = emb.embed("");
    CHECK(v.dim() == 256);
    CHECK(v.norm() == 0.0);
  }
  SUBCASE("repetition does not change the direction") { CHECK(emb.embed("abc abc") == emb.embed("abc")); }
  SUBCASE("two tokens land on their FNV buckets") {
    const auto v = emb.embed("insulin glucose");
    const auto a = fnv_reference("insulin") % 256, b = fnv_reference("glucose") % 256;
    REQUIRE(a != b);
    for (std::size_t i = 0; i < 256; ++i) {
      if (i == a || i == b)
        CHECK(v[i] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
      else
        CHECK(v[i] == 0.0);
    }
  }
  SUBCASE("unit norm and order independence") {
    const auto v = emb.embed("the quick brown fox jumps");
    CHECK(std::abs(v.norm() - 1.0) < 1e-9);
    CHECK(emb.embed("jumps fox brown quick the") == v);
  }
  CHECK_THROWS_AS(HashingEmbedder(0), Error);
}

TEST_CASE("embedding vectors reject non-finite values") {
  CHECK_THROWS_AS(EmbeddingVector({1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(EmbeddingVector({INFINITY}), Error);
}

TEST_CASE("graph serialisation and embedding") {
  const KnowledgeGraph kg({make_triple("a", "r", "b"), make_triple("c", "s", "d")});
  CHECK(serialize_for_embedding(kg) == "a r b\nc s d");
  EmbedderConfig cfg;
  CHECK(embed_graph(kg, cfg) == embed_text("a r b\nc s d", cfg));
}

TEST_CASE("embedder config validation") {
  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::Remote;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.endpoint = "http://127.0.0.1:1/v1/embeddings";
  cfg.model_id = "m";
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("remote embedder against a local endpoint") {
  testing::LocalServer srv;
  std::atomic<int> calls{0};
  std::atomic<int> dim{3};
  srv.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body.at("model") == "test-model");
    nlohmann::json data = nlohmann::json::array();
    for (const auto& text : body.at("input")) {
      std::vector<double> v(static_cast<std::size_t>(dim.load()), 0.0);
      v[0] = static_cast<double>(text.get<std::string>().size());
      data.push_back({{"embedding", v}});
    }
    res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
  });
  srv.server().Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });

  EmbedderConfig cfg;
  cfg.kind = EmbedderKind::Remote;
  cfg.endpoint = srv.url("/v1/embeddings");
  cfg.model_id = "test-model";
  RemoteEmbedder emb(cfg);
  const auto v = emb.embed("hello");
  CHECK(v.dim() == 3);
  CHECK(v[0] == 5.0);
  CHECK(emb.recorded_dim() == 3u);
  const auto batch = emb.embed_batch({"a", "abcd"});
  REQUIRE(batch.size() == 2);
  CHECK(batch[1][0] == 4.0);

  SUBCASE("dimension drift is a contract violation") {
    dim = 4;
    try {
      emb.embed("x");
      FAIL("expected drift error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Contract);
    }
  }
  SUBCASE("http failure is retryable") {
    EmbedderConfig bad = cfg;
    bad.endpoint = srv.url("/fail");
    RemoteEmbedder failing(bad);
    try {
      failing.embed("x");
      FAIL("expected remote error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Remote);
      CHECK(e.retryable());
    }
  }
}
