#pragma once

#include "osa/channel_model.hpp"
#include "osa/exact_solver.hpp"
#include "osa/instance.hpp"
#include "osa/policy.hpp"
#include "osa/reward.hpp"
#include "osa/sim.hpp"
#include "osa/theorem_checker.hpp"
