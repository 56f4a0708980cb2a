#pragma once

#include <string>

#include "lyapdecomp/lmi.hpp"

namespace lyapdecomp {

/// Sparse SDPA (".dat-s") text of the strengthened problem:
/// sum_i F_i x_i - F_0 ⪰ 0 with F_0 = -constant. Sign-constrained unknowns
/// form a trailing diagonal block. Entries are 1-based, upper triangular,
/// zeros omitted, values printed with %.15g.
std::string export_sdpa(const SDPProblem& p);

void write_sdpa_file(const SDPProblem& p, const std::string& path);

}  // namespace lyapdecomp
