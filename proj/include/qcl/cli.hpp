#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcl::cli {

//! Runs the qcorner-lab command line. Exit codes: 0 affirmative decision or
//! passing certificate, 1 negative decision or failed certificate, 2 usage or
//! input error, 3 numerically inconclusive.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcl::cli
