#include "tfnet/eval.hpp"

#include "tfnet/dataset.hpp"
#include "tfnet/parallel.hpp"
#include "tfnet/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace tfnet {

namespace {

ComponentModel cubic(double c1, double c2, double c3) { return ComponentModel{1.0, CubicLaw{c1, c2, c3}}; }

}  // namespace

CaseStudy case_study(int id) {
    CaseStudy study;
    study.id = id;
    study.model.length = kRecordLength;
    switch (id) {
        case 1:
            study.name = "two closely located NLFMs";
            study.model.components = {cubic(0.06, 0.25, -0.15), cubic(0.40, -0.25, 0.15)};
            break;
        case 2:
            study.name = "two crossing NLFMs";
            study.model.components = {cubic(0.35, -0.50, 1.0 / 3.0), cubic(0.10, 0.50, -1.0 / 3.0)};
            break;
        case 3:
            study.name = "crossing SFM and LFM";
            study.model.components = {ComponentModel{1.0, SinusoidalLaw{0.22, 0.12, 1.0, std::numbers::pi}},
                                      cubic(0.10, 0.12, 0.0)};
            break;
        default:
            throw std::invalid_argument("case study id must be 1, 2 or 3");
    }
    return study;
}

std::vector<CaseStudy> all_case_studies() { return {case_study(1), case_study(2), case_study(3)}; }

double nmse_trial_db(const TFImage& reference, const TFImage& estimate) {
    if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols()) {
        throw std::invalid_argument("nmse: reference and estimate shapes differ");
    }
    const double reference_norm = reference.norm();
    if (reference_norm == 0.0) throw std::invalid_argument("nmse: reference image is all zero");
    const double estimate_norm = estimate.norm();
    if (estimate_norm == 0.0) return 0.0;
    const double error = (reference / reference_norm - estimate / estimate_norm).squaredNorm();
    if (error == 0.0) return kNmseFloorDb;
    return std::max(kNmseFloorDb, 10.0 * std::log10(error));
}

double nmse(const TFImage& reference, std::span<const TFImage> estimates) {
    if (estimates.empty()) throw std::invalid_argument("nmse needs at least one estimate");
    double total = 0.0;
    for (const auto& estimate : estimates) total += nmse_trial_db(reference, estimate);
    return total / static_cast<double>(estimates.size());
}

std::string to_string(Method method) {
    switch (method) {
        case Method::Wvd: return "wvd";
        case Method::Omp: return "omp";
        case Method::L1Prox: return "l1prox";
        case Method::Dcnn: return "dcnn";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "wvd") return Method::Wvd;
    if (name == "omp") return Method::Omp;
    if (name == "l1prox") return Method::L1Prox;
    if (name == "dcnn") return Method::Dcnn;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected wvd, omp, l1prox or dcnn)");
}

TFImage apply_method(Method method, const ComplexSeries& noisy, const MethodContext& context) {
    switch (method) {
        case Method::Wvd:
            return normalize_input(wvd(noisy));
        case Method::Omp:
            return omp_tfr(noisy, context.omp);
        case Method::L1Prox:
            return l1prox_tfr(noisy, context.l1prox);
        case Method::Dcnn: {
            if (context.network == nullptr) throw std::invalid_argument("the dcnn method needs trained weights");
            return forward(*context.network, normalize_input(wvd(noisy))).cwiseMax(0.0);
        }
    }
    throw std::invalid_argument("unknown method");
}

NmseReport run_case(const CaseStudy& study, Method method, double snr_db, std::size_t trials,
                    std::uint64_t master_seed, const MethodContext& context, TrialImages* last) {
    if (trials < 1) throw std::invalid_argument("run_case needs at least one trial");
    if (method == Method::Dcnn && context.network == nullptr) {
        throw std::invalid_argument("the dcnn method needs trained weights");
    }
    const TFImage reference = ideal_tfr(study.model);
    const ComplexSeries clean = synthesize(study.model);

    NmseReport report;
    report.case_id = study.id;
    report.snr_db = snr_db;
    report.method = method;
    report.trials = trials;
    report.trial_db.assign(trials, 0.0);
    std::vector<TFImage> final_estimate(1);
    parallel_for(trials, [&](std::size_t k) {
        const ComplexSeries noisy = add_noise(clean, snr_db, mix_seed(master_seed, k));
        TFImage estimate = apply_method(method, noisy, context);
        report.trial_db[k] = nmse_trial_db(reference, estimate);
        if (k + 1 == trials) final_estimate[0] = std::move(estimate);
    });
    double total = 0.0;
    for (double value : report.trial_db) total += value;
    report.nmse_db = total / static_cast<double>(trials);

    if (last != nullptr) {
        last->model = reference;
        last->input = normalize_input(wvd(add_noise(clean, snr_db, mix_seed(master_seed, trials - 1))));
        last->estimate = std::move(final_estimate[0]);
    }
    return report;
}

std::vector<NmseReport> comparison_table(std::span<const Method> methods, std::span<const CaseStudy> cases,
                                         std::span<const double> snrs, std::size_t trials,
                                         std::uint64_t master_seed, const MethodContext& context) {
    if (methods.empty() || cases.empty() || snrs.empty()) {
        throw std::invalid_argument("comparison_table needs at least one method, case and SNR");
    }
    std::vector<NmseReport> reports;
    for (const auto& study : cases) {
        for (double snr : snrs) {
            for (Method method : methods) {
                reports.push_back(run_case(study, method, snr, trials, master_seed, context));
            }
        }
    }
    return reports;
}

void write_csv(std::ostream& out, std::span<const NmseReport> reports) {
    out << "case,snr_db,method,K,nmse_db\n";
    for (const auto& report : reports) {
        char value[64];
        std::snprintf(value, sizeof value, "%.6f", report.nmse_db);
        out << report.case_id << ',' << format_snr(report.snr_db) << ',' << to_string(report.method) << ','
            << report.trials << ',' << value << '\n';
    }
}

std::vector<std::uint8_t> log_gray_levels(const TFImage& image) {
    const double peak = image.size() == 0 ? 0.0 : image.maxCoeff();
    if (!(peak > 0.0)) throw std::domain_error("render_log_image: image maximum must be positive");
    std::vector<std::uint8_t> levels;
    levels.reserve(static_cast<std::size_t>(image.size()));
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
        for (Eigen::Index c = 0; c < image.cols(); ++c) {
            const double value = std::max(0.0, image(r, c));
            if (value == 0.0) {
                levels.push_back(0);
                continue;
            }
            const double db = std::max(-kRenderRangeDb, 10.0 * std::log10(value / peak));
            const double level = std::round(255.0 * (1.0 + db / kRenderRangeDb));
            levels.push_back(static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0)));
        }
    }
    return levels;
}

void render_log_image(const TFImage& image, const std::filesystem::path& path) {
    const auto levels = log_gray_levels(image);
    const auto times = static_cast<std::size_t>(image.rows());
    const auto bins = static_cast<std::size_t>(image.cols());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write image: " + path.string());
    out << "P5\n" << times << ' ' << bins << "\n255\n";
    for (std::size_t bin = bins; bin-- > 0;) {
        for (std::size_t t = 0; t < times; ++t) out.put(static_cast<char>(levels[t * bins + bin]));
    }
    if (!out) throw std::runtime_error("failed writing image: " + path.string());
}

}  // namespace tfnet
