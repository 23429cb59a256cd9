// Energy-estimate evaluation: mean error rate and over/under classification.
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "tada/analysis/metrics.hpp"

int main(int argc, char** argv) {
    using namespace tada::analysis;

    CLI::App app{"tada-eval: groundtruth vs estimated energy"};
    app.require_subcommand(1);

    std::string input, output;
    double tolerance = 0.0;
    auto* metrics = app.add_subcommand("metrics", "Mean error rate of a records CSV");
    metrics->add_option("input", input, "occasion_id,groundtruth_kcal,estimated_kcal,estimator_id")
        ->required()
        ->check(CLI::ExistingFile);
    metrics->add_option("-o,--out", output, "Write per-record classification CSV here");
    metrics->add_option("--tolerance", tolerance, "Exact band as a fraction of groundtruth")
        ->check(CLI::NonNegativeNumber);

    std::uint64_t seed = 1;
    int count = 200;
    double spread = 0.15;
    auto* demo = app.add_subcommand("demo", "Synthetic groundtruth/estimate scatter CSV");
    demo->add_option("--seed", seed, "RNG seed");
    demo->add_option("--count", count, "Number of occasions")->check(CLI::PositiveNumber);
    demo->add_option("--spread", spread, "Log-normal sigma of estimate / groundtruth")->check(CLI::NonNegativeNumber);
    demo->add_option("--tolerance", tolerance, "Exact band as a fraction of groundtruth")
        ->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<EvaluationRecord> records;
        if (*metrics) {
            std::ifstream in(input);
            records = read_records_csv(in);
        } else {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> groundtruth(150.0, 1500.0);
            std::lognormal_distribution<double> ratio(0.0, spread);
            for (int i = 0; i < count; ++i) {
                const double gt = groundtruth(rng);
                records.push_back({"synthetic-" + std::to_string(i + 1), gt, gt * ratio(rng), "synthetic"});
            }
        }

        if (*demo || !output.empty()) {
            std::ofstream file;
            if (!output.empty()) file.open(output);
            write_metrics_csv(output.empty() ? std::cout : file, records, tolerance);
        }

        int over = 0, under = 0, exact = 0;
        for (const auto& r : records) {
            switch (classify_estimate(r, tolerance)) {
            case EstimateClass::Over: ++over; break;
            case EstimateClass::Under: ++under; break;
            case EstimateClass::Exact: ++exact; break;
            }
        }
        auto& summary = *demo ? std::cerr : std::cout;
        summary << "records " << records.size() << "\nmean_error_rate_percent " << std::setprecision(6)
                << mean_error_rate(records) << "\nover " << over << "\nunder " << under << "\nexact " << exact
                << '\n';
    } catch (const std::exception& e) {
        std::cerr << "tada-eval: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
