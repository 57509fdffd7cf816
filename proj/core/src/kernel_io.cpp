// kernel_io.cpp: JSON serialization of CorrelationKernel.

#include "natcorr/kernel_io.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "natcorr/conventions.hpp"

namespace natcorr {

std::string kernel_to_json(const CorrelationKernel& kernel) {
    nlohmann::json j;
    j["type"] = "exp_mixture";
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : kernel.terms()) {
        terms.push_back({{"c_re", t.amplitude.real()},
                         {"c_im", t.amplitude.imag()},
                         {"g_re", t.rate.real()},
                         {"g_im", t.rate.imag()}});
    }
    j["terms"] = std::move(terms);
    if (kernel.source()) {
        j["beta"] = kernel.source()->beta;
        j["omega"] = kernel.source()->cutoff;
    } else {
        j["beta"] = nullptr;
        j["omega"] = nullptr;
    }
    j["k_max"] = kernel.k_max();
    j["tail_terms"] = kernel.tail_terms();
    j["remainder_bound"] = kernel.remainder_bound();
    j["regularization"] = kernel.regularization() == Regularization::Abel ? "abel" : "none";
    j["correlation_sign"] = kPinnedCorrelationSign;
    return j.dump();
}

CorrelationKernel kernel_from_json(const std::string& text) {
    try {
        const nlohmann::json j = nlohmann::json::parse(text);
        if (j.at("type").get<std::string>() != "exp_mixture") {
            throw std::invalid_argument("kernel_from_json: unsupported kernel type");
        }
        std::vector<ExpTerm> terms;
        for (const auto& t : j.at("terms")) {
            terms.push_back({{t.at("c_re").get<double>(), t.at("c_im").get<double>()},
                             {t.at("g_re").get<double>(), t.at("g_im").get<double>()}});
        }
        const std::string reg = j.value("regularization", std::string("none"));
        if (reg != "none" && reg != "abel") throw std::invalid_argument("kernel_from_json: unknown regularization");
        CorrelationKernel kernel(std::move(terms), reg == "abel" ? Regularization::Abel : Regularization::None);
        if (!j.at("beta").is_null() && !j.at("omega").is_null()) {
            const LorentzDrude ld{j.at("omega").get<double>(), j.at("beta").get<double>()};
            kernel.set_lorentz_drude_source(ld, j.at("k_max").get<std::size_t>(), j.value("tail_terms", std::size_t{0}),
                                            j.value("remainder_bound", 0.0));
        }
        return kernel;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("kernel_from_json: ") + e.what());
    }
}

}  // namespace natcorr
