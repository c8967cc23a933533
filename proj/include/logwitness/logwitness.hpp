#pragma once

// Umbrella header: equations over free matrix groups, prime reduction,
// Cayley-graph lifting, brute-force oracles, and the witness pipeline.

#include "logwitness/cayley.hpp"
#include "logwitness/errors.hpp"
#include "logwitness/intmat.hpp"
#include "logwitness/json_io.hpp"
#include "logwitness/modp.hpp"
#include "logwitness/oracle.hpp"
#include "logwitness/parallel.hpp"
#include "logwitness/pipeline.hpp"
#include "logwitness/rng.hpp"
#include "logwitness/words.hpp"
