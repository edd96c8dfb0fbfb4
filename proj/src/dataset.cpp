#include "msgest/dataset.hpp"

#include "msgest/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace msgest {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, std::int64_t row) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw CsvError(CsvError::Kind::malformed_row, "unterminated quote in row " + std::to_string(row),
                       row);
    fields.push_back(std::move(cur));
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_real(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    const char* first = s.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

void Dataset::validate() const {
    if (x.rows() < 1) throw DataError("dataset has no rows");
    if (x.cols() < 1) throw DataError("dataset has no feature columns");
    if (y.size() != x.rows())
        throw DataError("response length " + std::to_string(y.size()) + " does not match " +
                        std::to_string(x.rows()) + " rows");
    if (!column_names.empty() && static_cast<Index>(column_names.size()) != x.cols())
        throw DataError("column_names has the wrong length");
    if (task == Task::classification) {
        for (Index i = 0; i < y.size(); ++i)
            if (y[i] != 0.0 && y[i] != 1.0)
                throw DataError("classification response must be 0/1; row " + std::to_string(i + 1));
    }
}

Dataset Dataset::select_rows(std::span<const Index> rows) const {
    Dataset out;
    out.x.resize(static_cast<Index>(rows.size()), x.cols());
    out.y.resize(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
        out.x.row(static_cast<Index>(k)) = x.row(rows[k]);
        out.y[static_cast<Index>(k)] = y[rows[k]];
    }
    out.column_names = column_names;
    out.task = task;
    return out;
}

InclusionVector GroundTruth::inclusion() const {
    return InclusionVector::from_indices(static_cast<std::size_t>(beta.size()), support);
}

void SyntheticConfig::validate() const {
    if (n < 2) throw ConfigError("synthetic n must be >= 2");
    if (p < 1) throw ConfigError("synthetic p must be >= 1");
    if (s < 0 || s > p) throw ConfigError("synthetic s must satisfy 0 <= s <= p");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("synthetic rho must lie in [0, 1)");
}

std::vector<Index> PartitionPlan::subset(int i) const {
    std::vector<Index> rows;
    for (std::size_t k = 0; k < assignment.size(); ++k)
        if (assignment[k] == i) rows.push_back(static_cast<Index>(k));
    return rows;
}

std::vector<std::vector<Index>> PartitionPlan::subsets() const {
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < assignment.size(); ++k)
        out[static_cast<std::size_t>(assignment[k])].push_back(static_cast<Index>(k));
    return out;
}

CoefficientVector ScalingRecord::to_raw(const CoefficientVector& standardized) const {
    CoefficientVector raw = standardized;
    raw.values = standardized.values.cwiseQuotient(scale);
    raw.intercept = standardized.intercept - raw.values.dot(mean);
    return raw;
}

Dataset ScalingRecord::apply(const Dataset& d) const {
    if (d.cols() != mean.size()) throw DataError("scaling record does not match column count");
    Dataset out = d;
    out.x = (d.x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
    return out;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& response,
                 std::span<const std::string> categorical, Task task) {
    std::ifstream in(path);
    if (!in)
        throw CsvError(CsvError::Kind::missing_file, "cannot open CSV file '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        throw CsvError(CsvError::Kind::empty_data, "CSV file '" + path.string() + "' has no header", 0);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::vector<std::string> header = split_csv_line(line, 0);
    for (auto& h : header) h = trim(h);

    auto find_col = [&](const std::string& name) -> std::size_t {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw CsvError(CsvError::Kind::missing_column, "column '" + name + "' not found in header",
                           0, name);
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t response_col = find_col(response);
    std::vector<bool> is_categorical(header.size(), false);
    for (const auto& c : categorical) {
        std::size_t k = find_col(c);
        if (k == response_col)
            throw CsvError(CsvError::Kind::missing_column,
                           "response column '" + c + "' cannot be categorical", 0, c);
        is_categorical[k] = true;
    }

    std::vector<std::vector<std::string>> cells;
    std::int64_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        auto fields = split_csv_line(line, row);
        if (fields.size() != header.size())
            throw CsvError(CsvError::Kind::malformed_row,
                           "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                               " fields, header has " + std::to_string(header.size()),
                           row);
        cells.push_back(std::move(fields));
    }
    if (cells.empty())
        throw CsvError(CsvError::Kind::empty_data, "CSV file '" + path.string() + "' has no data rows");

    const Index n = static_cast<Index>(cells.size());

    // Column layout: original order, categoricals expanded in place.
    struct Source {
        std::size_t col;
        std::optional<std::string> level;
    };
    std::vector<Source> sources;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k == response_col) continue;
        if (is_categorical[k]) {
            std::set<std::string> levels;
            for (const auto& r : cells) levels.insert(trim(r[k]));
            for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
                sources.push_back({k, *it});
                names.push_back(header[k] + "=" + *it);
            }
        } else {
            sources.push_back({k, std::nullopt});
            names.push_back(header[k]);
        }
    }
    if (sources.empty())
        throw CsvError(CsvError::Kind::empty_data, "CSV file '" + path.string() + "' has no predictors");

    Dataset d;
    d.task = task;
    d.column_names = std::move(names);
    d.x.resize(n, static_cast<Index>(sources.size()));
    d.y.resize(n);
    for (Index i = 0; i < n; ++i) {
        const auto& r = cells[static_cast<std::size_t>(i)];
        auto yv = parse_real(r[response_col]);
        if (!yv)
            throw CsvError(CsvError::Kind::unparsable_cell,
                           "row " + std::to_string(i + 1) + ", column '" + response + "': cannot parse '" +
                               r[response_col] + "' as a finite real",
                           i + 1, response);
        if (task == Task::classification && *yv != 0.0 && *yv != 1.0)
            throw CsvError(CsvError::Kind::unparsable_cell,
                           "row " + std::to_string(i + 1) + ", column '" + response +
                               "': classification labels must be 0 or 1",
                           i + 1, response);
        d.y[i] = *yv;
        for (std::size_t c = 0; c < sources.size(); ++c) {
            const auto& src = sources[c];
            double v;
            if (src.level) {
                v = trim(r[src.col]) == *src.level ? 1.0 : 0.0;
            } else {
                auto parsed = parse_real(r[src.col]);
                if (!parsed)
                    throw CsvError(CsvError::Kind::unparsable_cell,
                                   "row " + std::to_string(i + 1) + ", column '" + header[src.col] +
                                       "': cannot parse '" + r[src.col] + "' as a finite real",
                                   i + 1, header[src.col]);
                v = *parsed;
            }
            d.x(i, static_cast<Index>(c)) = v;
        }
    }
    return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path, const std::string& response) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
    for (Index j = 0; j < d.cols(); ++j) {
        std::string name = d.column_names.empty() ? "x" + std::to_string(j + 1)
                                                  : d.column_names[static_cast<std::size_t>(j)];
        out << csv_quote(name) << ',';
    }
    out << csv_quote(response) << '\n';
    for (Index i = 0; i < d.rows(); ++i) {
        for (Index j = 0; j < d.cols(); ++j) out << format_real(d.x(i, j)) << ',';
        out << format_real(d.y[i]) << '\n';
    }
    if (!out) throw DataError("failed writing CSV file '" + path.string() + "'");
}

std::pair<Dataset, GroundTruth> generate_synthetic(const SyntheticConfig& cfg, Index extra_rows) {
    cfg.validate();
    if (extra_rows < 0) throw ConfigError("extra_rows must be >= 0");
    const Index n = cfg.n + extra_rows, p = cfg.p;

    std::mt19937_64 rng_support(mix_seed(cfg.seed, 1));
    std::mt19937_64 rng_beta(mix_seed(cfg.seed, 2));
    std::mt19937_64 rng_x(mix_seed(cfg.seed, 3));
    std::mt19937_64 rng_noise(mix_seed(cfg.seed, 4));
    std::normal_distribution<double> normal(0.0, 1.0);

    GroundTruth truth;
    std::vector<Index> perm(static_cast<std::size_t>(p));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng_support);
    truth.support.assign(perm.begin(), perm.begin() + cfg.s);
    std::sort(truth.support.begin(), truth.support.end());
    truth.s = cfg.s;

    const double nd = static_cast<double>(cfg.n);
    const double floor = 8.0 * std::log(nd) / std::sqrt(nd);
    std::bernoulli_distribution flip(0.4);
    truth.beta = Vector::Zero(p);
    for (Index j : truth.support) {
        double sign = flip(rng_beta) ? -1.0 : 1.0;
        truth.beta[j] = sign * (floor + std::abs(normal(rng_beta)));
    }

    Dataset d;
    d.x.resize(n, p);
    const double a = std::sqrt(1.0 - cfg.rho), b = std::sqrt(cfg.rho);
    for (Index i = 0; i < n; ++i) {
        double shared = normal(rng_x);
        for (Index j = 0; j < p; ++j) d.x(i, j) = a * normal(rng_x) + b * shared;
    }
    d.column_names.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) d.column_names.push_back("x" + std::to_string(j + 1));

    Vector eta = d.x * truth.beta;
    d.y.resize(n);
    switch (cfg.kind) {
    case SyntheticCase::case1:
        truth.noise = NoiseFamily::gaussian;
        truth.noise_param = 2.0;
        truth.sigma2 = 4.0;
        d.task = Task::regression;
        for (Index i = 0; i < n; ++i) d.y[i] = eta[i] + 2.0 * normal(rng_noise);
        break;
    case SyntheticCase::case2: {
        truth.noise = NoiseFamily::student_t;
        truth.noise_param = 3.0;
        truth.sigma2 = 3.0;
        d.task = Task::regression;
        std::student_t_distribution<double> t3(3.0);
        for (Index i = 0; i < n; ++i) d.y[i] = eta[i] + t3(rng_noise);
        break;
    }
    case SyntheticCase::case3: {
        truth.noise = NoiseFamily::logistic;
        d.task = Task::classification;
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (Index i = 0; i < n; ++i) {
            double prob = 1.0 / (1.0 + std::exp(-eta[i]));
            d.y[i] = unif(rng_noise) < prob ? 1.0 : 0.0;
        }
        break;
    }
    }
    return {std::move(d), std::move(truth)};
}

PartitionPlan random_partition(Index n, int m, std::uint64_t seed) {
    if (m < 1) throw ConfigError("number of subsets m must be >= 1");
    if (static_cast<Index>(m) > n)
        throw ConfigError("number of subsets m=" + std::to_string(m) + " exceeds n=" + std::to_string(n));
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    PartitionPlan plan;
    plan.m = m;
    plan.seed = seed;
    plan.assignment.resize(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < order.size(); ++k)
        plan.assignment[static_cast<std::size_t>(order[k])] = static_cast<int>(k % static_cast<std::size_t>(m));
    return plan;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& d, Index n_train) {
    if (n_train < 1 || n_train >= d.rows())
        throw ConfigError("n_train must satisfy 1 <= n_train < n (n_train=" + std::to_string(n_train) +
                          ", n=" + std::to_string(d.rows()) + ")");
    Dataset train, test;
    train.x = d.x.topRows(n_train);
    train.y = d.y.head(n_train);
    test.x = d.x.bottomRows(d.rows() - n_train);
    test.y = d.y.tail(d.rows() - n_train);
    train.column_names = test.column_names = d.column_names;
    train.task = test.task = d.task;
    return {std::move(train), std::move(test)};
}

std::pair<Dataset, ScalingRecord> standardize(const Dataset& d) {
    if (d.rows() < 2) throw DataError("standardize needs at least 2 rows");
    ScalingRecord rec;
    rec.mean = d.x.colwise().mean().transpose();
    rec.scale.resize(d.cols());
    for (Index j = 0; j < d.cols(); ++j) {
        double ss = (d.x.col(j).array() - rec.mean[j]).square().sum();
        double sd = std::sqrt(ss / static_cast<double>(d.rows() - 1));
        if (!(sd > 1e-14 * std::max(1.0, std::abs(rec.mean[j])))) {
            std::string name = d.column_names.empty() ? "#" + std::to_string(j + 1)
                                                      : d.column_names[static_cast<std::size_t>(j)];
            throw DataError("column '" + name + "' is constant and cannot be standardized");
        }
        rec.scale[j] = sd;
    }
    Dataset out = rec.apply(d);
    return {std::move(out), std::move(rec)};
}

std::uint64_t dataset_digest(const Dataset& d) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const void* data, std::size_t len) {
        auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= bytes[i];
            h *= 0x100000001b3ULL;
        }
    };
    Index dims[2] = {d.rows(), d.cols()};
    feed(dims, sizeof dims);
    feed(d.x.data(), sizeof(double) * static_cast<std::size_t>(d.x.size()));
    feed(d.y.data(), sizeof(double) * static_cast<std::size_t>(d.y.size()));
    return h;
}

const char* to_string(Task t) noexcept {
    return t == Task::regression ? "regression" : "classification";
}

const char* to_string(SyntheticCase c) noexcept {
    switch (c) {
    case SyntheticCase::case1: return "case1";
    case SyntheticCase::case2: return "case2";
    case SyntheticCase::case3: return "case3";
    }
    return "case1";
}

SyntheticCase synthetic_case_from_string(const std::string& s) {
    if (s == "case1" || s == "1") return SyntheticCase::case1;
    if (s == "case2" || s == "2") return SyntheticCase::case2;
    if (s == "case3" || s == "3") return SyntheticCase::case3;
    throw ConfigError("unknown synthetic case '" + s + "'");
}

} // namespace msgest
