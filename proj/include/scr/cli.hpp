// Command-line front end: verify, ope, intertwiner and cohomology commands.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "scr/fields.hpp"

namespace scr::cli {

// Exit status: 0 on success (for verify: no FAIL record), 1 on a failed check
// or computation error, 2 on a usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Singular part with coefficients written through named fields and scalars
// where they match up to a rational factor, e.g. "k/(z-w)^2 + H(w)/(z-w)".
struct NamedField {
  std::string name;
  fields::FieldExpr field;
};
struct NamedScalar {
  std::string name;
  ParamScalar value;
};
std::string format_ope(const fields::OpeResult& ope, const std::vector<NamedField>& fields,
                       const std::vector<NamedScalar>& scalars);

}  // namespace scr::cli
