#ifndef MCPOIS_TYPES_HPP
#define MCPOIS_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcpois {

enum class MisclassMode { OneSided, TwoSided };

struct Observation {
  std::string id;
  std::int64_t y = 0;           // count outcome
  double offset = 1.0;          // population, > 0
  int xstar = 0;                // error-prone exposure
  std::optional<int> x;         // true exposure, present iff queried
  std::vector<double> z;        // error-free covariates
  bool queried = false;
};

// Which terms enter the Poisson linear predictor:
// intercept, exposure, all covariates, then exposure x covariate interactions.
struct DesignSpec {
  int n_covariates = 0;
  std::vector<int> interactions;  // covariate indices interacted with the exposure

  int dimension() const {
    return 2 + n_covariates + static_cast<int>(interactions.size());
  }

  Eigen::VectorXd row(double x, const std::vector<double>& z) const {
    Eigen::VectorXd r(dimension());
    r(0) = 1.0;
    r(1) = x;
    for (int j = 0; j < n_covariates; ++j) r(2 + j) = z[j];
    for (std::size_t k = 0; k < interactions.size(); ++k)
      r(2 + n_covariates + static_cast<int>(k)) = x * z[interactions[k]];
    return r;
  }

  std::vector<std::string> term_names(const std::string& exposure,
                                      const std::vector<std::string>& covariates) const;
};

struct OutcomeModelParams {
  Eigen::VectorXd beta;
  DesignSpec design;

  double linear_predictor(double x, const std::vector<double>& z) const {
    return beta.dot(design.row(x, z));
  }
};

struct MisclassModelParams {
  Eigen::VectorXd eta;
  MisclassMode mode = MisclassMode::OneSided;

  // OneSided: (1, z...); TwoSided: (1, xstar, z...)
  static int dimension(MisclassMode mode, int n_covariates) {
    return (mode == MisclassMode::TwoSided ? 2 : 1) + n_covariates;
  }

  Eigen::VectorXd row(int xstar, const std::vector<double>& z) const {
    const int nz = static_cast<int>(z.size());
    Eigen::VectorXd r(dimension(mode, nz));
    int k = 0;
    r(k++) = 1.0;
    if (mode == MisclassMode::TwoSided) r(k++) = static_cast<double>(xstar);
    for (int j = 0; j < nz; ++j) r(k++) = z[j];
    return r;
  }
};

struct Dataset {
  std::vector<Observation> observations;
  std::vector<std::string> covariate_names;
  MisclassMode misclass_mode = MisclassMode::OneSided;

  int n_covariates() const { return static_cast<int>(covariate_names.size()); }

  // Throws ValidationError on any invariant violation.
  void validate() const;
};

}  // namespace mcpois

#endif
