#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shootout/domain.hpp"

namespace shootout {

struct FrozenLibrary : Error {
    using Error::Error;
};
struct TooFewClasses : Error {
    using Error::Error;
};
struct DegenerateCovariance : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};

// Historical feature vectors with verified categories; the static variant is
// frozen and rejects new verification rows.
struct AnalogLibrary {
    struct Row {
        std::vector<double> features;
        Category category = Category::Nonsignificant;
        std::string date;
    };
    std::vector<std::string> feature_names;
    std::vector<Row> rows;
    bool frozen = false;
};

// Linear discriminant model: per-class means, pooled within-class covariance
// with a ridge term, and class priors from training frequencies.
struct DiscriminantModel {
    std::vector<std::string> feature_names;
    std::array<Eigen::VectorXd, 3> means;  // zero-size when class absent
    std::array<double, 3> priors{0, 0, 0};
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd precision;  // covariance inverse, cached at fit time
};

// Recommended ridge when none is configured: 1e-6 * trace(S)/d (or 1e-6 for
// an all-zero scatter).
double default_ridge(const AnalogLibrary& lib);

DiscriminantModel fit_discriminant(const AnalogLibrary& lib, double ridge);

// Class posteriors from the shared-covariance Gaussian discriminant scores;
// classes absent from training get probability zero.
ProbTriple predict(const DiscriminantModel& model, const std::vector<double>& features);

// Appends a verified day; refitting happens at the next fit_discriminant.
AnalogLibrary absorb_verification(const AnalogLibrary& lib, const std::vector<double>& features,
                                  Category observed, const std::string& date);

// Library file: CSV with header date,category,<feature columns>.
AnalogLibrary read_library(const std::string& path);
void write_library(const std::string& path, const AnalogLibrary& lib);

}  // namespace shootout
