/// Runs FedZero and Random on a small synthetic population for one day and
/// prints round durations, energy and the time to a shared target accuracy.

#include <fedzero/fedzero.hpp>

#include <cstdio>

int main() {
    using namespace fedzero;
    SyntheticOptions opt;
    opt.num_clients = 30;
    opt.num_domains = 3;
    opt.days = 1;
    opt.seed = 7;
    opt.params.clients_per_round = 5;
    const auto env = synthetic_environment(opt);

    ExperimentOptions run;
    run.days = 1;
    run.seed = 1;
    const auto fz = run_experiment(env, StrategyKind::fedzero, run);
    const auto rnd = run_experiment(env, StrategyKind::random, run);
    const double target = rnd.best_accuracy();

    for (const auto* m : {&fz, &rnd}) {
        const auto [mean, sd] = m->duration_stats();
        const auto t = m->time_to_accuracy(target);
        std::printf("%-8s rounds %4zu  duration %5.1f +- %4.1f min  energy %9.0f Wmin  accuracy %.3f  target at %s\n",
                    m->strategy.c_str(), m->rounds.size(), mean, sd, m->total_energy(), m->final_accuracy(),
                    t ? std::to_string(*t).c_str() : "never");
    }
}
