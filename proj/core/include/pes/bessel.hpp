#pragma once

namespace pes {

// Exponentially scaled modified Bessel function of the first kind of
// order one: i1e(x) = exp(-x) * I1(x), x >= 0.
//
// The eigenvalue channel density needs I1 at arguments up to 4*im/sigma2,
// which overflows double precision well below the SNRs of interest. The
// scaled form stays bounded and callers fold the removed exponent into
// their own exponential term.
double i1e(double x);

}
