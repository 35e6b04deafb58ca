#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psiflow/analysis.hpp"
#include "psiflow/curve.hpp"
#include "psiflow/density.hpp"
#include "psiflow/flow.hpp"

namespace psiflow {

struct CurveSpec {
  enum class Shape { polar, polygon_file } shape = Shape::polar;
  // polar
  double rho0 = 1.0;
  std::vector<std::pair<int, double>> modes;
  Vec2 center{0.0, 0.0};
  int n_vertices = 256;
  // polygon_file
  std::string path;
};

struct OutputSpec {
  std::string trace;      // CSV, one row per accepted step
  std::string snapshots;  // JSON lines {"t":..., "vertices": [[x,y],...]}
  std::string summary;    // JSON document with prediction + outcome
  std::string svg;        // overlaid snapshot plot
};

struct ExperimentConfig {
  std::string id = "experiment";
  RadialDensity density = RadialDensity::flat();
  CurveSpec curve;
  FlowConfig flow;
  int snapshot_every = 100;
  OutputSpec outputs;
};

// Parses and validates a config document.  Unknown keys raise ParseError
// naming the key path; value violations are collected into one
// ValidationError.  Missing optional keys get the documented defaults.
ExperimentConfig parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& cfg);

// Density specs also appear on their own (phase-portrait CLI).
RadialDensity parse_density_spec(const std::string& text);

DiscreteCurve build_curve(const CurveSpec& spec);

// Deterministic emitters: floats at 17 significant digits, no timestamps.
void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& trace);
void append_snapshot_jsonl(std::ostream& os, double t, const DiscreteCurve& c);
std::vector<std::pair<double, DiscreteCurve>> read_snapshots_jsonl(
    std::istream& is);

struct ExperimentResult {
  ExperimentConfig config;
  Prediction prediction;
  FlowOutcome outcome;
  // measured-vs-predicted deltas (when both sides exist)
  std::optional<double> measured_final_radius;
  std::optional<double> t_est_delta;
  std::optional<double> radius_delta;
};

std::string summary_json(const ExperimentResult& r);

// Runs one experiment end to end and writes every configured output file.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace psiflow
