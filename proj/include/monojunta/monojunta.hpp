#pragma once

#include "monojunta/analysis.hpp"
#include "monojunta/bitcube.hpp"
#include "monojunta/dyadic.hpp"
#include "monojunta/errors.hpp"
#include "monojunta/experiment.hpp"
#include "monojunta/function_handle.hpp"
#include "monojunta/functions.hpp"
#include "monojunta/junta.hpp"
#include "monojunta/montecarlo.hpp"
#include "monojunta/results.hpp"
