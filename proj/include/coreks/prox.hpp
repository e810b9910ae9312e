#pragma once

#include <vector>

#include "coreks/kspace.hpp"
#include "coreks/wavelet.hpp"

namespace coreks {

// Element-wise complex soft-thresholding S_tau(z) = (z/|z|) max(|z| - tau, 0),
// with S_tau(0) = 0. Phase is preserved; magnitude shrinks by tau.
void soft_threshold(std::vector<cplx>& z, double tau);
void soft_threshold(CoefficientSet& w, double tau);
cplx soft_threshold(cplx z, double tau);

// Real scalar version: sign(x) max(|x| - tau, 0).
void soft_threshold(std::vector<double>& z, double tau);

// Per-readout l2 norms: entry j = ||v_j||_2 over the K samples of readout j.
std::vector<double> group_norms(const OutlierField& v);

// Per-readout radial scaling: readout j multiplied by scale_j. Zero readouts
// stay zero. With scale_j = max(||v_j|| - tau, 0)/||v_j|| this is the proximal
// map of tau * ||g(v)||_1.
OutlierField group_soft_threshold(const OutlierField& v, const std::vector<double>& scale);

}  // namespace coreks
