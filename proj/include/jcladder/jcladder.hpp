// jcladder.hpp: umbrella header

#pragma once

#include "jcladder/error.hpp"
#include "jcladder/transmon_spectrum.hpp"
#include "jcladder/rwa_ladder.hpp"
#include "jcladder/nonrwa_coupling.hpp"
#include "jcladder/resonance_finder.hpp"
#include "jcladder/tls_model.hpp"
#include "jcladder/cli_io.hpp"
