#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isrlu/activation.hpp"

namespace isrlu {

/// Owning buffer of float elements, the unit of kernel work.
using BatchBuffer = std::vector<float>;

struct BenchConfig {
  std::size_t n_elements = std::size_t{1} << 24;
  double negative_fraction = 0.5;
  int warmup_runs = 3;
  int timed_runs = 10;
  double value_lo = 1e-3;  // magnitude range, sampled log-uniformly
  double value_hi = 8.0;
  std::uint64_t seed = 42;

  /// Throws ContractError on n_elements == 0, timed_runs < 3, warmup_runs < 0,
  /// a fraction outside [0, 1] or an invalid magnitude range.
  void validate() const;
};

struct BenchRow {
  ActivationSpec spec;
  double ns_per_element = 0.0;
  double ratio_vs_isrlu = 0.0;         // ns / ns(ISRLU exact); NaN without such a row
  double ratio_vs_isrlu_approx = 0.0;  // ns / ns(ISRLU approx); NaN without such a row
  double checksum = 0.0;               // sum of the last timed output
  std::vector<double> run_ns;          // per timed run, wall-clock nanoseconds
};

struct BenchReport {
  std::vector<BenchRow> rows;
  BenchConfig config;
  std::string platform;
};

/// The seeded input buffer: log-uniform magnitudes, exactly
/// floor(negative_fraction * n) negative entries, shuffled.
BatchBuffer make_bench_input(const BenchConfig& config);

/// Times apply_forward for each spec over one shared input buffer:
/// warmup_runs untimed passes then timed_runs timed passes; ns_per_element
/// is the median pass time over n_elements. Single-threaded.
BenchReport run_bench(const BenchConfig& config, std::span<const ActivationSpec> specs);

/// Row label in the style of the published comparison table, e.g.
/// "ReLU", "ISRLU", "ISRLU (approx.)".
std::string display_name(const ActivationSpec& spec);

/// The five rows of the published comparison, in its order: ReLU,
/// ISRU (approx.), ISRLU (approx.), ISRLU, ELU.
std::vector<ActivationSpec> default_bench_specs(double alpha = 1.0, int approx_steps = 0);

enum class ReportStyle { Csv, Markdown };

/// Columns: function, ns_per_element (3 decimals), ratio_vs_isrlu and
/// ratio_vs_isrlu_approx (2 decimals with an "x" suffix; "n/a" when the
/// reference row is missing).
std::string format_report(const BenchReport& report, ReportStyle style);

/// Multi-line "key: value" echo of the configuration and platform.
std::string describe_config(const BenchReport& report);

}  // namespace isrlu
