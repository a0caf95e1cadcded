#pragma once

#include <iosfwd>

#include "bpr/models.hpp"

namespace bpr {

inline constexpr int kModelFormatVersion = 1;

/// Text format:
///   BPRMODEL <mf|knn|pop> 1
///   <|U|> <|I|> <k>        (mf)  |  <|I|>  (knn, pop)
///   rows of space-separated shortest round-trip decimals
/// mf writes |U| rows of W then |I| rows of H; knn writes upper-triangle
/// rows 0 .. |I|-2; pop writes one row of counts.
void save_model(std::ostream& out, const Model& m);

/// Throws VersionError or FormatError; never returns a partial model.
Model load_model(std::istream& in);

}  // namespace bpr
