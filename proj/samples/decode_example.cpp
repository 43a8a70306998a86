// Decodes the two four-by-six worked patterns and prints the theory peak.

#include <iostream>

#include <scma_ura/scma_ura.hpp>

int main()
{
    using namespace scma_ura;
    const auto f = builtin("f4x6");

    for (const SlotPattern& p : {SlotPattern({2, 1, 0, 0, 0, 1}), SlotPattern({1, 1, 0, 1, 0, 0})}) {
        const auto out = decode(p, f);
        std::cout << "decoded " << out.n_decoded << " of " << p.n_active << " users\n";
        write_trace(std::cout, 0, out);
    }

    const auto table = build_load_table(builtin("f6x15").params());
    std::cout << "f6x15 peak " << table.t_star << " at lambda_bar " << table.lambda_star << "\n";
}
