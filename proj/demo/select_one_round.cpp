/// Builds a selection problem by hand: two power domains, four clients, and
/// prints the plan FedZero picks for the next round.

#include <fedzero/selection/selector.hpp>

#include <cstdio>

int main() {
    using namespace fedzero;
    SelectionInput in;
    in.n = 2;
    in.d_max = 6;
    // Watt-minutes of excess energy per minute: the sun sets on domain 0.
    in.energy = {{600, 600, 300, 0, 0, 0}, {200, 250, 300, 350, 400, 450}};
    auto client = [&](std::size_t index, std::size_t domain, double sigma, Batches m_min, Batches m_max, Batches spare) {
        SelectionClient c;
        c.index = index;
        c.domain = domain;
        c.sigma = sigma;
        c.delta = 25.0;
        c.m_min = m_min;
        c.m_max = m_max;
        c.spare.assign(static_cast<std::size_t>(in.d_max), spare);
        return c;
    };
    in.clients = {client(0, 0, 3.0, 20, 100, 12), client(1, 0, 1.0, 10, 50, 8), client(2, 1, 2.0, 30, 150, 10),
                  client(3, 1, 0.5, 5, 25, 4)};

    const auto plan = select_round(in);
    if (!plan) {
        std::puts("no feasible round; wait one timestep");
        return 0;
    }
    std::printf("duration %ld, objective %.1f\n", static_cast<long>(plan->duration), plan->objective);
    for (std::size_t i = 0; i < plan->selected.size(); ++i) {
        std::printf("client %zu:", plan->selected[i]);
        for (auto b : plan->expected[i]) std::printf(" %ld", static_cast<long>(b));
        std::puts("");
    }
}
