#pragma once

#include "infobound/common.hpp"
#include "infobound/distributions.hpp"
#include "infobound/problem.hpp"
#include "infobound/cgf.hpp"
#include "infobound/divergences.hpp"
#include "infobound/bounds.hpp"
#include "infobound/sampling.hpp"
#include "infobound/posterior.hpp"
#include "infobound/harness.hpp"
