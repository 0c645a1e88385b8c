#include "isrlu/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "isrlu/errors.hpp"
#include "isrlu/kernels.hpp"

#if __has_include(<sys/utsname.h>)
#include <sys/utsname.h>
#define ISRLU_HAVE_UTSNAME 1
#endif

namespace isrlu {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string platform_note() {
  std::ostringstream os;
#ifdef ISRLU_HAVE_UTSNAME
  utsname info{};
  if (uname(&info) == 0) os << info.sysname << " " << info.release << " " << info.machine;
#endif
#if defined(__clang__)
  os << ", clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
  os << ", gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#endif
#if defined(__AVX512F__)
  os << ", AVX-512";
#elif defined(__AVX2__)
  os << ", AVX2";
#elif defined(__ARM_NEON)
  os << ", NEON";
#endif
  return os.str();
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string ratio_cell(double ratio) {
  return std::isfinite(ratio) ? fixed(ratio, 2) + "x" : std::string("n/a");
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

bool is_isrlu(const ActivationSpec& s, bool approx) {
  return s.kind == ActivationKind::Isrlu && s.tier.is_approx() == approx;
}

}  // namespace

void BenchConfig::validate() const {
  if (n_elements == 0) throw ContractError("bench: n_elements must be > 0");
  if (timed_runs < 3) throw ContractError("bench: timed_runs must be >= 3");
  if (warmup_runs < 0) throw ContractError("bench: warmup_runs must be >= 0");
  if (!(negative_fraction >= 0.0 && negative_fraction <= 1.0))
    throw ContractError("bench: negative_fraction must lie in [0, 1]");
  if (!(value_lo > 0.0) || !(value_hi >= value_lo) || !std::isfinite(value_hi) ||
      value_hi > std::numeric_limits<float>::max())
    throw ContractError("bench: magnitude range must satisfy 0 < lo <= hi < FLT_MAX");
}

BatchBuffer make_bench_input(const BenchConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> log_mag(std::log(config.value_lo), std::log(config.value_hi));
  BatchBuffer data(config.n_elements);
  for (float& x : data) x = static_cast<float>(std::exp(log_mag(rng)));
  const auto negatives = static_cast<std::size_t>(
      std::floor(config.negative_fraction * static_cast<double>(config.n_elements)));
  for (std::size_t i = 0; i < negatives; ++i) data[i] = -data[i];
  std::shuffle(data.begin(), data.end(), rng);
  return data;
}

BenchReport run_bench(const BenchConfig& config, std::span<const ActivationSpec> specs) {
  if constexpr (!Clock::is_steady) throw EnvironmentError("bench: no monotonic clock available");
  config.validate();
  if (specs.empty()) throw ContractError("bench: at least one activation spec is required");
  for (const auto& s : specs) s.validate();

  BenchReport report;
  report.config = config;
  report.platform = platform_note();

  const BatchBuffer input = make_bench_input(config);
  BatchBuffer output(input.size());
  volatile double sink = 0.0;

  for (const ActivationSpec& spec : specs) {
    BenchRow row;
    row.spec = spec;
    for (int i = 0; i < config.warmup_runs; ++i) {
      kernels::apply_forward<float>(spec, input, output);
      sink = sink + output[i % output.size()];
    }
    for (int i = 0; i < config.timed_runs; ++i) {
      const auto start = Clock::now();
      kernels::apply_forward<float>(spec, input, output);
      const auto stop = Clock::now();
      sink = sink + output[i % output.size()];
      // Sub-tick passes (tiny n) still count as 1 ns so ns/element stays positive.
      const auto ns = std::chrono::duration<double, std::nano>(stop - start).count();
      row.run_ns.push_back(std::max(ns, 1.0));
    }
    double checksum = 0.0;
    for (float v : output) checksum += v;
    row.checksum = checksum;
    row.ns_per_element = median(row.run_ns) / static_cast<double>(config.n_elements);
    report.rows.push_back(std::move(row));
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double ref_exact = nan;
  double ref_approx = nan;
  for (const auto& row : report.rows) {
    if (std::isnan(ref_exact) && is_isrlu(row.spec, false)) ref_exact = row.ns_per_element;
    if (std::isnan(ref_approx) && is_isrlu(row.spec, true)) ref_approx = row.ns_per_element;
  }
  for (auto& row : report.rows) {
    row.ratio_vs_isrlu = row.ns_per_element / ref_exact;
    row.ratio_vs_isrlu_approx = row.ns_per_element / ref_approx;
  }
  return report;
}

std::string display_name(const ActivationSpec& spec) {
  std::string name;
  switch (spec.kind) {
    case ActivationKind::Isrlu: name = "ISRLU"; break;
    case ActivationKind::Isru: name = "ISRU"; break;
    case ActivationKind::Elu: name = "ELU"; break;
    case ActivationKind::Relu: name = "ReLU"; break;
    case ActivationKind::Tanh: name = "tanh"; break;
    case ActivationKind::IsruSigmoid: name = "ISRU-sigmoid"; break;
  }
  if (spec.tier.is_approx() && has_rsqrt(spec.kind)) {
    name += " (approx.";
    if (spec.tier.refinement_steps > 0) name += ", " + std::to_string(spec.tier.refinement_steps) + " NR";
    name += ")";
  }
  return name;
}

std::vector<ActivationSpec> default_bench_specs(double alpha, int approx_steps) {
  const Tier approx = Tier::approx(approx_steps);
  return {
      {ActivationKind::Relu, alpha, Tier::exact()},
      {ActivationKind::Isru, alpha, approx},
      {ActivationKind::Isrlu, alpha, approx},
      {ActivationKind::Isrlu, alpha, Tier::exact()},
      {ActivationKind::Elu, alpha, Tier::exact()},
  };
}

std::string format_report(const BenchReport& report, ReportStyle style) {
  std::ostringstream os;
  if (style == ReportStyle::Csv) {
    os << "function,ns_per_element,ratio_vs_isrlu,ratio_vs_isrlu_approx\n";
    for (const auto& row : report.rows) {
      os << csv_field(display_name(row.spec)) << ',' << fixed(row.ns_per_element, 3) << ','
         << ratio_cell(row.ratio_vs_isrlu) << ',' << ratio_cell(row.ratio_vs_isrlu_approx) << '\n';
    }
    return os.str();
  }
  os << "| Activation function | ns/element | ISRLU perf advantage | ISRLU (approx.) perf advantage |\n";
  os << "|---|---:|---:|---:|\n";
  for (const auto& row : report.rows) {
    os << "| " << display_name(row.spec) << " | " << fixed(row.ns_per_element, 3) << " | "
       << ratio_cell(row.ratio_vs_isrlu) << " | " << ratio_cell(row.ratio_vs_isrlu_approx) << " |\n";
  }
  return os.str();
}

std::string describe_config(const BenchReport& report) {
  const BenchConfig& c = report.config;
  std::ostringstream os;
  os << "n_elements: " << c.n_elements << '\n'
     << "negative_fraction: " << c.negative_fraction << '\n'
     << "magnitudes: log-uniform [" << c.value_lo << ", " << c.value_hi << "]\n"
     << "warmup_runs: " << c.warmup_runs << '\n'
     << "timed_runs: " << c.timed_runs << " (median reported)\n"
     << "seed: " << c.seed << '\n'
     << "platform: " << report.platform << '\n';
  for (const auto& row : report.rows)
    os << "checksum[" << describe(row.spec) << "]: " << row.checksum << '\n';
  return os.str();
}

}  // namespace isrlu
