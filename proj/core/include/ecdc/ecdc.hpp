#pragma once

#include "ecdc/errors.hpp"
#include "ecdc/generator.hpp"
#include "ecdc/model.hpp"
#include "ecdc/optimizer.hpp"
#include "ecdc/parallel.hpp"
#include "ecdc/potential.hpp"
#include "ecdc/reward.hpp"
#include "ecdc/sim.hpp"
#include "ecdc/stationary.hpp"
