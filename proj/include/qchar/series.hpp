#pragma once

namespace qchar {

enum class Series { A, B, C };

inline char series_letter(Series s) { return s == Series::A ? 'A' : s == Series::B ? 'B' : 'C'; }

}  // namespace qchar
