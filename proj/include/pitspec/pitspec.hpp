#pragma once

#include "pitspec/bootstrap.hpp"
#include "pitspec/distributions.hpp"
#include "pitspec/errors.hpp"
#include "pitspec/estimation.hpp"
#include "pitspec/models.hpp"
#include "pitspec/montecarlo.hpp"
#include "pitspec/optimize.hpp"
#include "pitspec/process.hpp"
#include "pitspec/report.hpp"
#include "pitspec/rng.hpp"
#include "pitspec/sequence.hpp"
#include "pitspec/statistics.hpp"
