#pragma once

#include "flockstab/conditions.hpp"
#include "flockstab/errors.hpp"
#include "flockstab/fixtures.hpp"
#include "flockstab/io.hpp"
#include "flockstab/model.hpp"
#include "flockstab/polynomial.hpp"
#include "flockstab/rootcurves.hpp"
#include "flockstab/simulation.hpp"
#include "flockstab/spec_json.hpp"
#include "flockstab/spectral.hpp"
