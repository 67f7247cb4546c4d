#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "hyperhaar/graphs.hpp"
#include "hyperhaar/grid.hpp"
#include "hyperhaar/spectrum.hpp"

namespace hyperhaar {

inline constexpr const char* kVersion = "hyperhaar 0.1.0";

// {"resolution": [m1,...,md], "mode": "exact", "values": ["p/q", ...]}
// Values in cell linear order (first axis most significant).
std::string grid_to_json(const ExactGrid& f);
ExactGrid grid_from_json(std::string_view text);

// CSV rows "rect,coeff": the mean first with the literal rect field "mean",
// then the Haar coefficients keyed by the rectangle text encoding, in map
// order.  Constant axes use the sentinel encoding "-1:0".
void write_spectrum_csv(std::ostream& out, const HaarSpectrum<Rational>& spec);

// {"vertices": [...], "edges": {"2": [[v,w], ...], ...}}
std::string graph_to_json(const ColoredGraph& g);
ColoredGraph graph_from_json(std::string_view text);

// CSV "d,n,p,norm,slope": one row per moment point, the measured series
// first, then the free-parameter and pinned comparison series; the slope
// column repeats the row's series log-log slope.
void write_beck_csv(std::ostream& out, const BeckGainReport& report);

}  // namespace hyperhaar
