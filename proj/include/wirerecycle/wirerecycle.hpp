#pragma once

#include "circuit.hpp"
#include "causal.hpp"
#include "recycle.hpp"
#include "formats.hpp"
#include "verify.hpp"
#include "driver.hpp"
