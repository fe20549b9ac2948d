#include "mcpois/types.hpp"

#include "mcpois/errors.hpp"

namespace mcpois {

std::vector<std::string> DesignSpec::term_names(
    const std::string& exposure, const std::vector<std::string>& covariates) const {
  std::vector<std::string> names;
  names.reserve(dimension());
  names.push_back("(Intercept)");
  names.push_back(exposure);
  for (int j = 0; j < n_covariates; ++j) names.push_back(covariates[j]);
  for (int idx : interactions) names.push_back(exposure + ":" + covariates[idx]);
  return names;
}

void Dataset::validate() const {
  const int nz = n_covariates();
  bool any_queried_pos = false;
  for (const auto& o : observations) {
    if (o.y < 0)
      throw ValidationError("observation " + o.id + ": negative count");
    if (!(o.offset > 0.0))
      throw ValidationError("observation " + o.id + ": offset must be positive");
    if (static_cast<int>(o.z.size()) != nz)
      throw ValidationError("observation " + o.id + ": covariate dimension mismatch");
    if (o.queried != o.x.has_value())
      throw ValidationError("observation " + o.id + ": queried flag inconsistent with x");
    if (misclass_mode == MisclassMode::OneSided && o.xstar == 0 && o.x && *o.x == 1)
      throw ValidationError("observation " + o.id +
                            ": one-sided structural violation (x=1 with xstar=0)");
    if (o.queried && o.xstar == 1) any_queried_pos = true;
  }
  if (!any_queried_pos)
    throw ValidationError("no queried observation with xstar=1; eta is unidentifiable");
}

}  // namespace mcpois
