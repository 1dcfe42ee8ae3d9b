#ifndef SDDELAN_SDDELAN_HPP
#define SDDELAN_SDDELAN_HPP

#include "sddelan/error.hpp"
#include "sddelan/experiment.hpp"
#include "sddelan/fundamental.hpp"
#include "sddelan/inference.hpp"
#include "sddelan/initial_path.hpp"
#include "sddelan/json_io.hpp"
#include "sddelan/ks.hpp"
#include "sddelan/limit_laws.hpp"
#include "sddelan/measure.hpp"
#include "sddelan/rng.hpp"
#include "sddelan/simulate.hpp"
#include "sddelan/spectrum.hpp"

#endif  // SDDELAN_SDDELAN_HPP
