#pragma once

// Umbrella header: optimal binary classification when the classified
// behavior responds to the committed classifier.

#include "perfclass/classifier.hpp"
#include "perfclass/dist.hpp"
#include "perfclass/error.hpp"
#include "perfclass/json_io.hpp"
#include "perfclass/model.hpp"
#include "perfclass/oracle.hpp"
#include "perfclass/solver.hpp"
