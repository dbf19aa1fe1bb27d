#pragma once

// Serialisation of attribution results: coloured DOT and GraphML graphs and a
// key-sorted JSON report.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "kgsmile/evaluation.hpp"
#include "kgsmile/graph.hpp"
#include "kgsmile/metrics.hpp"
#include "kgsmile/surrogate.hpp"

namespace kgsmile {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ColorMode { Sequential, Diverging };

struct ColorScale {
  ColorMode mode = ColorMode::Sequential;
  std::vector<double> edge_intensity;            // by triple index
  std::map<std::string, double> node_intensity;  // by entity id
};

/// Sequential uses the report's min-max intensities. Diverging maps 0 to 0.5
/// and +-max|score| to 1 / 0.
ColorScale make_color_scale(const AttributionReport& report, ColorMode mode);
/// Diverging when scores have both signs, sequential otherwise.
ColorScale default_color_scale(const AttributionReport& report);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  std::string hex() const;
};

/// Per-channel linear interpolation, rounded half up.
Rgb interpolate(Rgb from, Rgb to, double t);
Rgb node_color(double intensity, ColorMode mode);
Rgb edge_color(double intensity, ColorMode mode);

std::string export_dot(const KnowledgeGraph& kg, const AttributionReport& report, const ColorScale& scale);
std::string export_dot(const KnowledgeGraph& kg, const AttributionReport& report);
std::string export_graphml(const KnowledgeGraph& kg, const AttributionReport& report);

struct RunManifest {
  std::map<std::string, std::string> config;
  std::map<std::string, std::uint64_t> seeds;
  std::optional<std::map<std::string, double>> wall_times_s;  // opt-in; stripped for byte-stable reports
  std::string version = std::string(kVersion);
};

struct ReportInput {
  const KnowledgeGraph* kg = nullptr;
  const AttributionReport* attribution = nullptr;
  std::optional<double> intercept;
  std::optional<FidelityReport> fidelity;
  std::optional<StabilityReport> stability;
  std::optional<ConsistencyReport> consistency;
  std::optional<AccuracyReport> accuracy;
  std::optional<double> faithfulness_pearson;
  std::optional<CompositeSimilarityResult> composite;
  std::map<std::string, std::string> answers;
  RunManifest manifest;
};

std::string export_report(const ReportInput& input);

}  // namespace kgsmile
