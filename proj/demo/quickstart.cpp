// Quickstart: simulate AR(1)-GARCH(1,1) returns, test a GARCH(1,1) null that
// ignores the autoregression, and print the estimates, p-values and the
// generalized autocorrelogram.

#include <iostream>
#include <vector>

#include "pitspec/pitspec.hpp"

int main() {
    using namespace pitspec;

    const auto dgp = ConditionalModel::from_id("ar1-garch11-n");
    ParamVector truth;
    truth.ar1 = 0.4;
    const auto y = dgp.simulate(truth, 500, 42);

    const auto null_model = ConditionalModel::from_id("garch11-n");
    const std::vector<StatisticSpec> specs{StatisticSpec::marginal(Norm::CvM), StatisticSpec::adj0(1),
                                           StatisticSpec::adj(5), StatisticSpec::mdj(1)};
    BootstrapOptions opts;
    opts.workers = 0;
    const auto run = parametric_bootstrap(null_model, y, specs, 99, 7, opts);

    write_estimate_table(std::cout, null_model, run.fit);
    std::cout << '\n';
    write_pvalue_table(std::cout, null_model, run);

    const auto acg_run = parametric_bootstrap(null_model, y, autocorrelogram_specs(Norm::CvM, 5), 99, 7, opts);
    std::cout << '\n';
    write_autocorrelogram_csv(std::cout, make_autocorrelogram(null_model, acg_run, Norm::CvM));
    return 0;
}
