#include "hope/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hope/errors.hpp"
#include "internal/csv.hpp"

namespace hope::stats {

namespace {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            tokens.push_back(token);
            token.clear();
        }
    };
    for (char c : text) {
        unsigned char uc = static_cast<unsigned char>(c);
        if (std::isspace(uc)) {
            flush();
        } else if (std::ispunct(uc)) {
            // stripped, not treated as a separator
        } else {
            token += static_cast<char>(std::tolower(uc));
        }
    }
    flush();
    return tokens;
}

std::map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                                std::size_t n) {
    std::map<std::string, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) {
            if (k) key += '\x1f';
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

// Regularized incomplete beta via the standard continued-fraction expansion.
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIterations = 300;
    constexpr double kEpsilon = 3e-14;
    constexpr double kTiny = 1e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                       b * std::log(1.0 - x);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

using internal::parse_csv_line;

} // namespace

double bleu(std::string_view reference, std::string_view candidate, std::size_t max_n) {
    auto ref_tokens = tokenize(reference);
    if (ref_tokens.empty()) throw data_error("bleu: reference must be non-empty");
    auto cand_tokens = tokenize(candidate);
    if (cand_tokens.empty()) return 0.0;
    if (max_n < 1) throw usage_error("bleu: max_n must be >= 1");

    const std::size_t orders = std::min(max_n, cand_tokens.size());
    double log_precision_sum = 0.0;
    for (std::size_t n = 1; n <= orders; ++n) {
        auto cand_counts = ngram_counts(cand_tokens, n);
        auto ref_counts = ngram_counts(ref_tokens, n);
        std::size_t matched = 0, total = 0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
        if (matched == 0) return 0.0; // unsmoothed
        log_precision_sum += std::log(static_cast<double>(matched) / static_cast<double>(total));
    }
    double geometric_mean = std::exp(log_precision_sum / static_cast<double>(orders));

    double brevity = 1.0;
    if (cand_tokens.size() < ref_tokens.size()) {
        brevity = std::exp(1.0 - static_cast<double>(ref_tokens.size()) /
                                     static_cast<double>(cand_tokens.size()));
    }
    return brevity * geometric_mean;
}

std::string concat_passages(const chunkers::PassageSet& passages) {
    if (passages.passages.empty()) throw data_error("concat_passages: empty passage set");
    std::string out;
    for (const auto& passage : passages.passages) {
        std::string_view text = passage.text;
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
            text.remove_prefix(1);
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
            text.remove_suffix(1);
        if (text.empty()) continue;
        if (!out.empty()) out += ' ';
        out += text;
    }
    return out;
}

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw data_error("pearson: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw data_error("pearson: need at least 3 samples");

    double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);

    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mean_x;
        double dy = ys[i] - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if (var_x == 0.0 || var_y == 0.0) {
        throw data_error("pearson: zero variance leaves the correlation undefined");
    }

    double rho = std::clamp(cov / std::sqrt(var_x * var_y), -1.0, 1.0);

    // two-tailed p from the exact Student-t: p = I_x(nu/2, 1/2), x = nu/(nu+t^2)
    const double nu = static_cast<double>(n - 2);
    double p_value;
    if (1.0 - rho * rho <= 0.0) {
        p_value = 0.0;
    } else {
        double t_sq = rho * rho * nu / (1.0 - rho * rho);
        p_value = incomplete_beta(nu / 2.0, 0.5, nu / (nu + t_sq));
    }
    return {rho, p_value, n};
}

double relative_gain(std::span<const double> series) {
    if (series.size() < 2) throw data_error("relative_gain: need at least 2 readings");
    double first = series.front();
    if (!(first > 0.0)) throw data_error("relative_gain: first reading must be positive");
    return 100.0 * (series.back() - first) / first;
}

IndicatorTable IndicatorTable::load_csv(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw io_error("cannot open indicator file: " + file.string());

    std::string line;
    if (!std::getline(in, line)) throw data_error("indicator file is empty: " + file.string());
    auto header = parse_csv_line(line);
    if (header.size() < 3 || header[0] != "document_id" || header[1] != "chunker_id") {
        throw data_error("indicator header must be document_id,chunker_id,<metric...>");
    }

    IndicatorTable table;
    table.metric_names.assign(header.begin() + 2, header.end());

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = parse_csv_line(line);
        if (fields.size() != header.size()) {
            throw data_error("indicator row " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        std::pair<std::string, std::string> key{fields[0], fields[1]};
        if (table.rows.count(key)) {
            throw data_error("duplicate indicator key (" + key.first + ", " + key.second + ")");
        }
        std::vector<double> values;
        values.reserve(fields.size() - 2);
        for (std::size_t i = 2; i < fields.size(); ++i) {
            std::size_t consumed = 0;
            double value;
            try {
                value = std::stod(fields[i], &consumed);
            } catch (const std::exception&) {
                throw data_error("indicator row " + std::to_string(line_no) +
                                 ": cannot parse value '" + fields[i] + "'");
            }
            if (consumed != fields[i].size() || !std::isfinite(value)) {
                throw data_error("indicator row " + std::to_string(line_no) +
                                 ": non-finite or trailing junk in '" + fields[i] + "'");
            }
            values.push_back(value);
        }
        table.rows.emplace(std::move(key), std::move(values));
    }
    return table;
}

std::vector<Bin> equal_count_bins(
    std::vector<std::pair<double, std::map<std::string, double>>> rows, std::size_t bins) {
    if (rows.empty() || bins == 0) return {};
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });

    const std::size_t n = rows.size();
    bins = std::min(bins, n);

    std::vector<Bin> out;
    out.reserve(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        std::size_t begin = b * n / bins;
        std::size_t end = (b + 1) * n / bins;
        Bin bin;
        bin.count = end - begin;
        for (std::size_t i = begin; i < end; ++i) {
            bin.x_mean += rows[i].first;
            for (const auto& [name, value] : rows[i].second) bin.means[name] += value;
        }
        bin.x_mean /= static_cast<double>(bin.count);
        for (auto& [name, value] : bin.means) value /= static_cast<double>(bin.count);
        out.push_back(std::move(bin));
    }
    return out;
}

} // namespace hope::stats
