#include "shootout/analog.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace shootout {

namespace {

Eigen::MatrixXd pooled_scatter(const AnalogLibrary& lib,
                               const std::array<Eigen::VectorXd, 3>& means) {
    const auto d = static_cast<Eigen::Index>(lib.feature_names.size());
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
    for (const auto& row : lib.rows) {
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(row.features.data(), d);
        const Eigen::VectorXd diff = x - means[category_code(row.category)];
        scatter += diff * diff.transpose();
    }
    return scatter;
}

}  // namespace

double default_ridge(const AnalogLibrary& lib) {
    const auto d = static_cast<Eigen::Index>(lib.feature_names.size());
    if (d == 0 || lib.rows.empty()) return 1e-6;
    std::array<Eigen::VectorXd, 3> means;
    std::array<int, 3> counts{0, 0, 0};
    for (int c = 0; c < 3; ++c) means[c] = Eigen::VectorXd::Zero(d);
    for (const auto& row : lib.rows) {
        means[category_code(row.category)] +=
            Eigen::Map<const Eigen::VectorXd>(row.features.data(), d);
        ++counts[category_code(row.category)];
    }
    for (int c = 0; c < 3; ++c)
        if (counts[c] > 0) means[c] /= counts[c];
    double tr = pooled_scatter(lib, means).trace() / double(lib.rows.size());
    return tr > 0 ? 1e-6 * tr / double(d) : 1e-6;
}

DiscriminantModel fit_discriminant(const AnalogLibrary& lib, double ridge) {
    if (ridge < 0) throw Error("ridge must be non-negative");
    const auto d = static_cast<Eigen::Index>(lib.feature_names.size());
    if (d == 0) throw Error("library has no features");

    std::array<int, 3> counts{0, 0, 0};
    for (const auto& row : lib.rows) {
        if (static_cast<Eigen::Index>(row.features.size()) != d)
            throw DimensionMismatch("library row length mismatch");
        ++counts[category_code(row.category)];
    }
    int n_classes = (counts[0] > 0) + (counts[1] > 0) + (counts[2] > 0);
    if (n_classes < 2) throw TooFewClasses("need at least 2 distinct categories to fit");

    DiscriminantModel m;
    m.feature_names = lib.feature_names;
    std::array<Eigen::VectorXd, 3> means;
    for (int c = 0; c < 3; ++c) means[c] = Eigen::VectorXd::Zero(d);
    for (const auto& row : lib.rows)
        means[category_code(row.category)] +=
            Eigen::Map<const Eigen::VectorXd>(row.features.data(), d);
    const double n = double(lib.rows.size());
    for (int c = 0; c < 3; ++c) {
        m.priors[c] = counts[c] / n;
        if (counts[c] > 0) {
            means[c] /= counts[c];
            m.means[c] = means[c];
        } else {
            m.means[c] = Eigen::VectorXd();  // absent class
        }
    }

    // MLE divisor n (not n - k): keeps the fit invariant under duplicating
    // every row, which the replay checks rely on.
    Eigen::MatrixXd cov = pooled_scatter(lib, means) / n;
    cov += ridge * Eigen::MatrixXd::Identity(d, d);

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw DegenerateCovariance("pooled covariance not positive definite after ridge");
    m.covariance = cov;
    m.precision = llt.solve(Eigen::MatrixXd::Identity(d, d));
    return m;
}

ProbTriple predict(const DiscriminantModel& model, const std::vector<double>& features) {
    const auto d = static_cast<Eigen::Index>(model.feature_names.size());
    if (static_cast<Eigen::Index>(features.size()) != d)
        throw DimensionMismatch("feature vector length " + std::to_string(features.size()) +
                                ", model expects " + std::to_string(d));
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(features.data(), d);

    std::array<double, 3> score{};
    std::array<bool, 3> present{};
    double best = -1e300;
    for (int c = 0; c < 3; ++c) {
        present[c] = model.means[c].size() > 0 && model.priors[c] > 0;
        if (!present[c]) continue;
        const Eigen::VectorXd& mu = model.means[c];
        // Linear discriminant: mu' P x - mu' P mu / 2 + ln(prior).
        score[c] = mu.dot(model.precision * x) - 0.5 * mu.dot(model.precision * mu) +
                   std::log(model.priors[c]);
        best = std::max(best, score[c]);
    }
    std::array<double, 3> post{0, 0, 0};
    for (int c = 0; c < 3; ++c)
        if (present[c]) post[c] = std::exp(score[c] - best);
    return normalize_triple(post[0], post[1], post[2]);
}

AnalogLibrary absorb_verification(const AnalogLibrary& lib, const std::vector<double>& features,
                                  Category observed, const std::string& date) {
    if (lib.frozen) throw FrozenLibrary("static library does not accept verification data");
    if (features.size() != lib.feature_names.size())
        throw DimensionMismatch("feature vector length mismatch on absorb");
    AnalogLibrary next = lib;
    next.rows.push_back({features, observed, date});
    return next;
}

AnalogLibrary read_library(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open analog library: " + path);
    AnalogLibrary lib;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (lineno == 1) {
            if (f.size() < 3 || f[0] != "date" || f[1] != "category")
                throw Error(path + ": header must be date,category,<features>");
            lib.feature_names.assign(f.begin() + 2, f.end());
            continue;
        }
        if (f.size() != lib.feature_names.size() + 2)
            throw Error(path + ":" + std::to_string(lineno) + ": wrong field count");
        AnalogLibrary::Row row;
        row.date = f[0];
        row.category = category_from_code(static_cast<int>(parse_double(f[1])));
        for (size_t i = 2; i < f.size(); ++i) row.features.push_back(parse_double(f[i]));
        lib.rows.push_back(std::move(row));
    }
    if (lib.feature_names.empty()) throw Error(path + ": empty library file");
    return lib;
}

void write_library(const std::string& path, const AnalogLibrary& lib) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write analog library: " + path);
    std::vector<std::string> header{"date", "category"};
    header.insert(header.end(), lib.feature_names.begin(), lib.feature_names.end());
    out << join_csv(header) << "\n";
    for (const auto& row : lib.rows) {
        std::vector<std::string> f{row.date, std::to_string(category_code(row.category))};
        for (double x : row.features) f.push_back(format_double(x));
        out << join_csv(f) << "\n";
    }
}

}  // namespace shootout
