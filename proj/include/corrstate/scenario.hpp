#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "corrstate/dataset.hpp"
#include "corrstate/indicators.hpp"
#include "corrstate/report.hpp"

namespace corrstate {

struct AddedParameter {
  ParameterMeta meta;
  std::vector<double> values;  // exactly t_max entries
};

struct ValueOverride {
  std::string parameter_id;
  int t = 0;
  double value = 0.0;
};

struct ScaleFactor {
  std::string parameter_id;
  double factor = 1.0;  // positive
};

/// A management scenario as a dataset transformation: scaled and/or
/// overridden base columns followed by added parameter series. Applying a
/// strategy never changes t_max and never mutates the base dataset.
struct Strategy {
  std::string id;
  std::vector<AddedParameter> added_parameters;
  std::vector<ValueOverride> overrides;
  std::vector<ScaleFactor> scale_factors;
};

Dataset apply_strategy(const Dataset& base, const Strategy& strategy);

/// Synthetic stand-in for an enterprise ledger. Base columns follow a
/// one-factor model x_j(t) = w f(t) + sqrt(1-w^2) e_j(t) with w =
/// sqrt(base_correlation), so every base pair has correlation
/// base_correlation in expectation. Strategy columns mix randomly chosen
/// base columns with fresh noise at the given coupling:
/// y(t) = coupling * mean(sources) + (1-coupling) * e(t).
struct SyntheticSpec {
  int n_base = 200;
  int t_max = 60;
  std::uint64_t seed = 1;
  double base_correlation = 0.3;  // in [0, 1)
  int coupled_count = 5;
  double coupling = 0.9;  // in [0, 1]
};

std::pair<Dataset, Strategy> generate_synthetic(const SyntheticSpec& spec);

/// Indicator series for base and for apply_strategy(base, strategy), their
/// delta (base minus strategy), and the config echo, in one report.
ComparisonReport run_comparison(const Dataset& base, const Strategy& strategy,
                                WindowSpec spec, const SweepOptions& opts,
                                const std::string& method_label = "");

}  // namespace corrstate
