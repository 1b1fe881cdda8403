#pragma once

#include "freegeo/measure.hpp"

namespace freegeo {

// Law of the Lyapunov exponents: the log-pushforward of the limit law G(mu),
// with density e^t f(e^t) on the log-image of the support.  Requires
// mu({0}) = 0.  When the support of G(mu) reaches down to 0 the image is
// unbounded below; the table is truncated where the remaining tail mass drops
// under 1e-6, with the truncation recorded in the output notes.
Measure lyapunov_distribution(const Measure& mu, const EvalConfig& cfg = {});

}  // namespace freegeo
