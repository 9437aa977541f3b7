// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "aabsp/datalab.hpp"
#include "aabsp/model.hpp"
#include "aabsp/optimizer.hpp"

namespace aabsp::cli {

// Test metadata for a data file ([data] section); every field may be
// overridden by a command-line flag.
struct DataMeta {
  std::optional<int> n;
  std::optional<double> tau1;
  std::optional<Regime> regime;
  std::optional<int> r;
  std::optional<double> tau2;
  std::optional<bool> stress_changed;
};

// Sections: [priors] alpha_j beta_j l_j; [costs] C_s v_s C_t C_a C_r;
// [loss] a_0 a_j a_i_j (i <= j); [search] n_max full_bound grid_points
// tau_tol tau1_hi mode fixed_tau1 threads; [plan] n r m tau1;
// [theta] lambda_j phi_j; [data] n tau1 regime r tau2 stress_changed.
// Indices are 1-based; J is the largest prior index and must be dense.
struct RunConfig {
  std::optional<PriorSpec> priors;
  std::optional<CostModel> costs;
  std::optional<LossPoly> loss;
  SearchConfig search;
  std::optional<Plan> plan;
  std::optional<Theta> theta;
  DataMeta data;

  // Accessors for required sections; throw ConfigError naming the section.
  const PriorSpec& require_priors() const;
  const CostModel& require_costs() const;
  const LossPoly& require_loss() const;
  const Theta& require_theta() const;
};

// Throws ConfigError (unknown key, bad number, missing coefficient; the
// field path is "section.key") or ParseError (malformed INI line).
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

SearchMode parse_mode(const std::string& text);
Regime parse_regime(const std::string& text);

}  // namespace aabsp::cli
