// Small walk through the library: increments, an operator on a trig form,
// the Laplacian tensor, the symbol and one Hodge solve.

#include <iostream>

#include "hodc/hodc.hpp"

using namespace hodc;

int main() {
    // degree increments for second-order operators in the plane
    auto inc = admissible_increments(2, 2);
    std::cout << "C(n-1+k,k) = " << inc.m.get_str() << "\n";
    for (const auto& s : inc.admissible) std::cout << "  l=" << s.ell << " N=" << s.N << "\n";

    OperatorSpec s(make_ordering(2, 2, 1, 3, OrderingKind::diagonal));

    Form<TrigPoly> f(2, 3, 0, TrigPoly(2));
    f[0] = TrigPoly::cos_mode({1, 0});
    f[0] += TrigPoly::sin_mode({1, 2}, mpq_class(1, 3));
    auto Tf = apply_T(s, f);
    std::cout << "T f:\n";
    for (size_t r = 0; r < Tf.size(); ++r) std::cout << "  " << Tf.label(r).str() << ": " << coeff_to_json(Tf[r]).dump() << "\n";
    std::cout << "T T f == 0: " << apply_T(s, Tf).is_zero() << "\n";
    std::cout << "<Tf,Tf> = " << inner_product(Tf, Tf).get_str() << "\n";

    auto t = box_coeff_tensor(s, 1);
    std::cout << "box on 1-forms: " << t.entries.size() << " nonzero coefficients, kronecker "
              << is_kronecker(t, s.alphas().size()) << "\n";

    Poly p;
    if (scalar_symbol(box_symbol_poly(s, 0), &p)) std::cout << "symbol: " << p.str() << "\n";
    auto scan = ellipticity_scan(s, 0, 64, true);
    std::cout << "min quotient (source) = " << scan.exact_min.get_str() << "\n";

    // Z with T~Z = F for F = T~ of a smooth function
    Form<TrigPoly> phi(2, 3, 0, TrigPoly(2));
    phi[0] = TrigPoly::cos_mode({2, 1});
    auto F = to_grid(apply_T(s, phi), 32);
    auto h = hodge_solve(s, 0, F, std::nullopt);
    std::cout << "hodge residual = " << h.residual_T << "\n";
    return 0;
}
