#include "kgsmile/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "kgsmile/error.hpp"
#include "kgsmile/similarity.hpp"

namespace kgsmile {

FidelityReport fidelity(std::span<const double> f, std::span<const double> g, std::span<const double> w,
                        std::size_t n_s) {
  if (f.size() != g.size() || f.size() != w.size()) throw Error(ErrorKind::Shape, "fidelity inputs differ in length");
  if (f.size() < 2) throw Error(ErrorKind::Contract, "fidelity needs at least 2 samples");
  if (std::any_of(w.begin(), w.end(), [](double x) { return !(x > 0.0); }))
    throw Error(ErrorKind::Contract, "fidelity weights must be positive");

  const auto n = static_cast<double>(f.size());
  const double f_mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
  double wsum = 0.0, wf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    wsum += w[i];
    wf += w[i] * f[i];
  }
  const double f_wmean = wf / wsum;

  FidelityReport r;
  r.n_p = f.size();
  r.n_s = n_s;
  double sse = 0.0, sst = 0.0, sst_w = 0.0, diff_sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    diff_sum += d;
    sse += d * d;
    sst += (f[i] - f_mean) * (f[i] - f_mean);
    sst_w += (f[i] - f_wmean) * (f[i] - f_wmean);
    r.mean_l1 += std::abs(d);
    r.weighted_l1 += std::abs(d) * w[i];
    r.weighted_l2 += d * d * w[i];
  }
  r.mean_l1 /= n;
  r.mean_l2 = sse / n;
  r.weighted_l1 /= n;
  r.weighted_l2 /= n;
  r.mean_loss = std::abs(diff_sum) / n;  // |mean f - mean g| with a single rounding
  if (sst > 0.0) r.r2 = 1.0 - sse / sst;
  if (sst_w > 0.0) r.r2w = 1.0 - sse / sst_w;
  if (r.r2w && r.n_p > r.n_s + 1)
    r.adj_r2w = 1.0 - (1.0 - *r.r2w) * (n - 1.0) / (n - static_cast<double>(n_s) - 1.0);
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Shape, "pearson inputs differ in length");
  if (x.size() < 2) throw Error(ErrorKind::Contract, "pearson needs at least 2 points");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::Undefined, "correlation undefined for zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

AucFraction roc_auc_exact(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::Shape, "scores and labels differ in length");
  if (std::any_of(scores.begin(), scores.end(), [](double s) { return std::isnan(s); }))
    throw Error(ErrorKind::Contract, "AUC scores contain NaN");
  const std::uint64_t pos = static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), true));
  const std::uint64_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::Undefined, "AUC needs both positive and negative labels");

  // rank-sum form of the pair count: sort, then walk tie groups
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::uint64_t twice = 0;  // 2 * concordant + ties
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t p = 0, q = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      labels[order[j]] ? ++p : ++q;
      ++j;
    }
    twice += p * (2 * neg_below + q);
    neg_below += q;
    i = j;
  }
  AucFraction out{twice, 2 * pos * neg};
  const std::uint64_t g = std::gcd(out.numerator, out.denominator);
  if (g > 1) {
    out.numerator /= g;
    out.denominator /= g;
  }
  return out;
}

double roc_auc(std::span<const double> scores, const std::vector<bool>& labels) {
  return roc_auc_exact(scores, labels).value();
}

double population_stddev(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : values) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  return std::sqrt(m2 / static_cast<double>(k));
}

std::string_view to_string(SimilarityClass c) noexcept {
  switch (c) {
    case SimilarityClass::VeryLow: return "very_low";
    case SimilarityClass::Low: return "low";
    case SimilarityClass::Medium: return "medium";
    case SimilarityClass::High: return "high";
  }
  return "very_low";
}

SimilarityClass classify_similarity(double composite) noexcept {
  if (composite < 0.3) return SimilarityClass::VeryLow;
  if (composite < 0.5) return SimilarityClass::Low;
  if (composite < 0.7) return SimilarityClass::Medium;
  return SimilarityClass::High;
}

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "about", "above", "after", "again", "against", "among", "because", "before", "being", "below",
      "between", "could", "doing", "during", "every", "further", "having", "might", "other", "ought",
      "rather", "shall", "should", "since", "their", "theirs", "there", "these", "thing", "things",
      "those", "through", "under", "until", "where", "which", "while", "whose", "within", "without",
      "would", "yours", "yourself", "themselves", "itself", "known", "however", "therefore", "although",
  };
  return words;
}

}  // namespace

std::set<std::string> key_concepts(std::string_view text) {
  std::set<std::string> out;
  for (auto& tok : tokenize(text))
    if (tok.size() >= 5 && !stopwords().contains(tok)) out.insert(std::move(tok));
  return out;
}

CompositeSimilarityResult composite_similarity(std::string_view a, std::string_view b, Embedder& embedder) {
  CompositeSimilarityResult r;
  const auto ta = tokenize(a), tb = tokenize(b);
  if (ta.empty() || tb.empty()) return r;

  r.semantic = mapped_cosine(cosine(embedder.embed(a), embedder.embed(b)));
  r.concept_overlap = jaccard(key_concepts(a), key_concepts(b));

  std::map<std::string, std::pair<double, double>> tf;
  for (const auto& t : ta) tf[t].first += 1.0;
  for (const auto& t : tb) tf[t].second += 1.0;
  std::vector<double> va, vb;
  for (const auto& [tok, counts] : tf) {
    va.push_back(counts.first);
    vb.push_back(counts.second);
  }
  r.content = mapped_cosine(cosine(va, vb));
  r.composite = (r.semantic + r.concept_overlap + r.content) / 3.0;
  r.classification = classify_similarity(r.composite);
  return r;
}

CompositeSimilarityResult composite_similarity(std::string_view a, std::string_view b, const EmbedderConfig& cfg) {
  return composite_similarity(a, b, *make_embedder(cfg));
}

}  // namespace kgsmile
