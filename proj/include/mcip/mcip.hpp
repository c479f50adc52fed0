#pragma once

// Umbrella header.
#include "mcip/chisq.hpp"
#include "mcip/ci.hpp"
#include "mcip/error.hpp"
#include "mcip/gaussian.hpp"
#include "mcip/graph.hpp"
#include "mcip/io.hpp"
#include "mcip/joint.hpp"
#include "mcip/loglinear.hpp"
#include "mcip/oracle_verify.hpp"
