#pragma once

#include <string>
#include <vector>

#include "anchorstream/simulation.hpp"

namespace anchorstream {

// Named scenario presets covering the full study grid. Families:
//   t5/N<cases>/psi<frac>          N_tot = 10000
//   t6/N<cases>/psi<frac>          N_tot = 1000
//   b1/N<cases>/psi<frac>          N_tot = 250
//   b2/N<cases>/psi<frac>          N_tot = 500
//   b3/psymp<p>/p1symp<p>          N_tot = 1029, N = 156, anchor = 200
// psi presets convert to a fixed anchor size of round(N_tot * psi).
// Replications/draws/seed carry study defaults and are meant to be
// overridden by the caller.
std::vector<std::string> preset_names();

bool is_preset(const std::string& name);

// Throws ValidationError for unknown names.
SimScenario preset_scenario(const std::string& name);

}  // namespace anchorstream
