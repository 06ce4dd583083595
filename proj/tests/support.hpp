#pragma once

#include <random>

#include "bohm/integrate.hpp"
#include "bohm/params.hpp"
#include "bohm/scenario.hpp"
#include "bohm/validate.hpp"

namespace bohm::test {

inline ScenarioParams fig_params(const char* name) { return preset(name).params; }

inline ScenarioParams fig4_with_n(std::size_t n) {
  const auto p = fig_params("fig4");
  return with_single_pointer(p, *p.common_xi(), n);
}

inline Configuration random_support(const ScenarioParams& p, std::mt19937_64& rng) {
  return sample_support_configuration(p, IntegratorOptions{}.resolved_t_end(p), rng);
}

}  // namespace bohm::test
