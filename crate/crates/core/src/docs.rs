//! Machine-checked index mapping every formula of the implemented model
//! to its home module, operation, and tests.
//!
//! The table is rendered to `docs/equation-index.md`; a test compares
//! the rendered table against the committed file so drift fails CI.

/// One indexed formula.
#[derive(Debug, Clone, Copy)]
pub struct EquationEntry {
    pub id: u32,
    pub formula: &'static str,
    pub module: &'static str,
    pub operation: &'static str,
    pub tests: &'static str,
}

pub const FIRST_EQUATION: u32 = 1;
pub const LAST_EQUATION: u32 = 57;

pub const EQUATION_INDEX: &[EquationEntry] = &[
    EquationEntry { id: 1, formula: "A = a f(N) = f(N+1) a,  A+ = f(N) a+ = a+ f(N+1)", module: "fock", operation: "FockOperators::build", tests: "fock::tests::deformed_action_on_number_state; acceptance::criterion_9_algebra_suite" },
    EquationEntry { id: 2, formula: "[A, N] = A,  [A+, N] = -A+", module: "fock", operation: "FockOperators::check_commutators", tests: "fock::tests::boson_commutator_for_identity; fock::tests::deformed_commutator_matches_bracket_difference" },
    EquationEntry { id: 3, formula: "[A, A+] = (N+1) f^2(N+1) - N f^2(N)", module: "fock", operation: "FockOperators::check_commutators", tests: "fock::tests::interior_commutator_across_dims_and_kinds; acceptance::criterion_9_algebra_suite" },
    EquationEntry { id: 4, formula: "f(N) = sqrt([N]/N),  [N] = (q^N - q^-N)/(q - q^-1)", module: "deformation", operation: "DeformationSpec::eval_f", tests: "deformation::tests::q_real_bracket_two_is_twice_cosh_tau; deformation::tests::bracket_equals_n_times_f_squared" },
    EquationEntry { id: 5, formula: "[A, A+] = [N+1] - [N]", module: "fock", operation: "FockOperators::check_commutators", tests: "fock::tests::deformed_commutator_matches_bracket_difference" },
    EquationEntry { id: 6, formula: "[N] = sinh(N ln q)/sinh(ln q) for real q", module: "deformation", operation: "DeformationSpec::eval_box", tests: "deformation::tests::q_real_bracket_two_is_twice_cosh_tau; deformation::tests::q_real_bracket_consistency" },
    EquationEntry { id: 7, formula: "A = sqrt([N+1]/(N+1)) a = a sqrt([N]/N) and adjoint", module: "fock", operation: "FockOperators::build", tests: "fock::tests::deformed_action_on_number_state; fock::tests::hermitian_conjugation_exact" },
    EquationEntry { id: 8, formula: "drho/dt = -(i/hbar)[H, rho] + (1/2hbar) sum_j ([V_j rho, V_j+] + [V_j, rho V_j+])", module: "generator", operation: "DeformedLiouvillian::apply (undeformed reduction)", tests: "oracles::undeformed_limit_matches_independent_lindblad_assembly" },
    EquationEntry { id: 9, formula: "H = p^2/2m + m w^2 q^2 / 2  (= w(N + 1/2) in natural units)", module: "generator", operation: "DeformedLiouvillian::apply (commutator term)", tests: "generator::tests::coherence_phase_rotation" },
    EquationEntry { id: 10, formula: "V_j = a_j p + b_j q, complex a_j, b_j", module: "environment", operation: "EnvironmentCoefficients::from_environment_couplings", tests: "environment::tests::coupling_sign_convention; environment::tests::zero_b_couplings_are_non_dissipative" },
    EquationEntry { id: 11, formula: "q = sqrt(hbar/2mw)(a+ + a),  p = i sqrt(hbar m w/2)(a+ - a)", module: "fock", operation: "annihilation / creation", tests: "fock::tests::annihilation_superdiagonal; fock::tests::number_operator_is_a_dag_a" },
    EquationEntry { id: 12, formula: "undeformed master equation with D1, D2 +/- lambda groups", module: "generator", operation: "DeformedLiouvillian::apply at f = 1", tests: "oracles::undeformed_limit_matches_independent_lindblad_assembly; generator::tests::decay_of_first_excited_state_at_zero_temperature" },
    EquationEntry { id: 13, formula: "D1 = m w D_qq - D_pp/(m w) + 2i D_pq,  D2 = m w D_qq + D_pp/(m w)", module: "environment", operation: "EnvironmentCoefficients::from_diffusion", tests: "environment::tests::derived_coefficients_from_symmetric_diffusion; environment::tests::d1_vanishes_iff_matched" },
    EquationEntry { id: 14, formula: "D_qq = (hbar/2) sum |a_j|^2, D_pp = (hbar/2) sum |b_j|^2, D_pq = -(hbar/2) Re sum a_j* b_j, lambda = -Im sum a_j* b_j", module: "environment", operation: "EnvironmentCoefficients::from_environment_couplings", tests: "environment::tests::coupling_sign_convention; environment::tests::duplicated_pair_doubles_coefficients; environment::tests::global_phase_leaves_couplings_invariant" },
    EquationEntry { id: 15, formula: "(i) D_pp > 0, (ii) D_qq > 0, (iii) D_pp D_qq - D_pq^2 >= hbar^2 lambda^2 / 4", module: "environment", operation: "EnvironmentCoefficients::from_diffusion", tests: "environment::tests::rejects_uncertainty_violation; acceptance::criterion_9_algebra_suite" },
    EquationEntry { id: 16, formula: "rho_G = e^{-H/kT} / Tr e^{-H/kT} is stationary", module: "generator", operation: "DensityMatrix::thermal_gibbs + stationarity", tests: "generator::tests::gibbs_state_is_stationary_for_undeformed_thermal; acceptance::criterion_7_relaxation_to_gibbs" },
    EquationEntry { id: 17, formula: "thermal D_pp = (lambda/2) hbar m w coth(theta), D_qq = (lambda/2)(hbar/m w) coth(theta), D_pq = 0", module: "environment", operation: "EnvironmentCoefficients::thermal", tests: "environment::tests::thermal_reduction; environment::tests::thermal_always_satisfies_constraints" },
    EquationEntry { id: 18, formula: "deformed master equation (D1, D1*, D2 +/- lambda groups with f-shifted factors)", module: "generator", operation: "DeformedLiouvillian::apply", tests: "generator::tests::number_rep_matches_operator_form; acceptance::criterion_1_generator_equivalence" },
    EquationEntry { id: 19, formula: "thermal deformed master equation (coth factor)", module: "generator", operation: "DeformedLiouvillian::apply (thermal coefficients)", tests: "evolve::tests::moment_check_agrees_for_undeformed_thermal; acceptance::criterion_4_moment_equation_consistency" },
    EquationEntry { id: 20, formula: "T = 0 deformed master equation", module: "generator", operation: "DeformedLiouvillian::apply (coth = 1)", tests: "generator::tests::decay_of_first_excited_state_at_zero_temperature; generator::tests::vacuum_is_stationary_at_zero_temperature" },
    EquationEntry { id: 21, formula: "d<N>/dt = lambda{(coth-1)<(N+1)f^2(N+1)> - (coth+1)<N f^2(N)>}", module: "moments", operation: "full_moment_rhs", tests: "moments::tests::full_rhs_reduces_at_identity_deformation; acceptance::criterion_4_moment_equation_consistency" },
    EquationEntry { id: 22, formula: "d<N^2>/dt = lambda{(coth-1)<(2N+1)(N+1)f^2(N+1)> - (coth+1)<(2N-1)N f^2(N)>}", module: "moments", operation: "full_moment_rhs", tests: "evolve::tests::moment_check_agrees_for_undeformed_thermal; acceptance::criterion_4_moment_equation_consistency" },
    EquationEntry { id: 23, formula: "d<N>/dt in box form: lambda{(coth-1)<[N+1]> - (coth+1)<[N]>}", module: "moments", operation: "full_moment_rhs_qbox", tests: "moments::tests::generic_and_box_routes_agree" },
    EquationEntry { id: 24, formula: "d<N^2>/dt in box form", module: "moments", operation: "full_moment_rhs_qbox", tests: "moments::tests::generic_and_box_routes_agree" },
    EquationEntry { id: 25, formula: "[N] = N - (tau^2/6)(N - N^3) to lowest Taylor order", module: "deformation", operation: "taylor_box", tests: "deformation::tests::taylor_bracket_matches_arithmetic; deformation::tests::taylor_remainder_is_fourth_order; acceptance::criterion_9_algebra_suite" },
    EquationEntry { id: 26, formula: "Taylor-expanded d<N>/dt with N(N+1) and 2N^3+3N^2+N terms", module: "moments", operation: "full_moment_rhs_qbox (q-taylor)", tests: "oracles::taylor_expanded_moment_equations_match_polynomial_form" },
    EquationEntry { id: 27, formula: "Taylor-expanded d<N^2>/dt with 8N^3+9N^2+N and 4N^4+6N^3+5N^2+3N terms", module: "moments", operation: "full_moment_rhs_qbox (q-taylor)", tests: "oracles::taylor_expanded_moment_equations_match_polynomial_form" },
    EquationEntry { id: 28, formula: "N^3 = a+^3 a^3 + 3N^2 - 2N (normal-ordering identity)", module: "moments", operation: "truncated_rhs (closure)", tests: "oracles::cubic_normal_ordering_identity" },
    EquationEntry { id: 29, formula: "closed d<N>/dt after dropping <a+^3 a^3>", module: "moments", operation: "truncated_rhs", tests: "moments::tests::truncated_rhs_arithmetic_at_zero_temperature; moments::tests::undeformed_rhs_reduces_to_linear_decay" },
    EquationEntry { id: 30, formula: "closed d<N^2>/dt after dropping <a+^3 a^3>", module: "moments", operation: "truncated_rhs", tests: "moments::tests::truncated_rhs_arithmetic_at_zero_temperature" },
    EquationEntry { id: 31, formula: "T = 0: d<N>/dt = -tau^2 lambda <N^2> + (tau^2 - 2) lambda <N>", module: "moments", operation: "truncated_rhs (coth = 1)", tests: "moments::tests::truncated_rhs_arithmetic_at_zero_temperature; acceptance::criterion_5_truncated_system_fidelity" },
    EquationEntry { id: 32, formula: "T = 0: d<N^2>/dt = -(3 tau^2 + 4) lambda <N^2> + (2 + 3 tau^2) lambda <N>", module: "moments", operation: "truncated_rhs (coth = 1)", tests: "moments::tests::truncated_rhs_arithmetic_at_zero_temperature; acceptance::criterion_5_truncated_system_fidelity" },
    EquationEntry { id: 33, formula: "S(t) = (<N(t)>, <N^2(t)>)", module: "moments", operation: "MomentState", tests: "moments::tests::solve_t0_initial_condition" },
    EquationEntry { id: 34, formula: "M = lambda [[tau^2-2, -tau^2], [2+3tau^2, -3tau^2-4]]", module: "moments", operation: "MomentSystem::new", tests: "moments::tests::system_matrix_invariants; acceptance::criterion_5_truncated_system_fidelity" },
    EquationEntry { id: 35, formula: "dS/dt = M S", module: "moments", operation: "integrate_truncated", tests: "moments::tests::truncated_integration_matches_closed_form_at_zero_temperature" },
    EquationEntry { id: 36, formula: "S(t) = R^-1 e^{Ft} R S(0)", module: "moments", operation: "solve_t0", tests: "oracles::matrix_exponential_route_matches_closed_solution" },
    EquationEntry { id: 37, formula: "explicit 2x2 propagator with rates 2 lambda and 2 lambda(2 + tau^2)", module: "moments", operation: "solve_t0", tests: "moments::tests::eigen_initial_data_decay_at_pure_rates" },
    EquationEntry { id: 38, formula: "<N(t)> in propagator form", module: "moments", operation: "solve_t0", tests: "oracles::closed_solutions_match_both_printed_forms" },
    EquationEntry { id: 39, formula: "<N^2(t)> in propagator form", module: "moments", operation: "solve_t0", tests: "oracles::closed_solutions_match_both_printed_forms" },
    EquationEntry { id: 40, formula: "<N(t)> regrouped by decay mode", module: "moments", operation: "solve_t0", tests: "oracles::closed_solutions_match_both_printed_forms" },
    EquationEntry { id: 41, formula: "<N^2(t)> regrouped by decay mode", module: "moments", operation: "solve_t0", tests: "oracles::closed_solutions_match_both_printed_forms" },
    EquationEntry { id: 42, formula: "leading-order <N(t)> in tau^2", module: "moments", operation: "solve_t0_leading", tests: "moments::tests::leading_order_initial_condition_telescopes; acceptance::criterion_3_figure_curves; acceptance::criterion_8_deformed_ode_vs_leading_order" },
    EquationEntry { id: 43, formula: "leading-order <N^2(t)> with secular term -2 lambda tau^2 t", module: "moments", operation: "solve_t0_leading", tests: "moments::tests::leading_order_error_is_fourth_order_in_tau; acceptance::criterion_3_figure_curves" },
    EquationEntry { id: 44, formula: "tau -> 0: <N(t)> = e^{-2 lambda t} <N(0)>", module: "moments", operation: "solve_t0 / solve_t0_leading at tau = 0", tests: "moments::tests::undeformed_solution_in_closed_form; evolve::tests::undeformed_decay_matches_exponential; acceptance::criterion_2_undeformed_limit" },
    EquationEntry { id: 45, formula: "tau -> 0: <N^2(t)> = e^{-4 lambda t}(<N^2(0)> - <N(0)>) + e^{-2 lambda t}<N(0)>", module: "moments", operation: "solve_t0 / solve_t0_leading at tau = 0", tests: "moments::tests::leading_order_reduces_to_undeformed_at_zero_tau; acceptance::criterion_2_undeformed_limit" },
    EquationEntry { id: 46, formula: "number-representation recursion for d rho_mn / dt", module: "generator", operation: "DeformedLiouvillian::apply_number_rep", tests: "generator::tests::number_rep_matches_operator_form; generator::tests::ground_state_gain_reads_off_the_recursion; acceptance::criterion_1_generator_equivalence" },
    EquationEntry { id: 47, formula: "population equation dP(n)/dt for D1 = 0 (generic f)", module: "populations", operation: "population_rhs", tests: "populations::tests::generator_diagonal_matches_population_rhs; generator::tests::populations_decouple_when_d1_vanishes" },
    EquationEntry { id: 48, formula: "population equation in box form", module: "populations", operation: "population_rhs (q rates)", tests: "populations::tests::deformed_rates_use_the_bracket; populations::tests::chain_converges_to_the_steady_state_for_every_kind" },
    EquationEntry { id: 49, formula: "t+(n) = (D2-lambda)(n+1) f^2(n+1),  t-(n) = (D2+lambda) n f^2(n)", module: "populations", operation: "rates", tests: "populations::tests::undeformed_rate_arithmetic; populations::tests::no_de_excitation_from_the_ground_state" },
    EquationEntry { id: 50, formula: "t+(n) = (D2-lambda)[n+1],  t-(n) = (D2+lambda)[n]", module: "populations", operation: "rates", tests: "populations::tests::deformed_rates_use_the_bracket" },
    EquationEntry { id: 51, formula: "dP(n)/dt = t+(n-1)P(n-1) + t-(n+1)P(n+1) - [t+(n) + t-(n)]P(n)", module: "populations", operation: "population_rhs", tests: "populations::tests::probability_is_conserved_exactly; populations::tests::steady_state_is_geometric_and_annihilates_the_rhs" },
    EquationEntry { id: 52, formula: "P_ss(n) = P(0) ((D2-lambda)/(D2+lambda))^n", module: "populations", operation: "steady_state", tests: "populations::tests::steady_state_is_geometric_and_annihilates_the_rhs; acceptance::criterion_6_steady_state" },
    EquationEntry { id: 53, formula: "detailed balance t-(n)P(n) = t+(n-1)P(n-1)", module: "populations", operation: "detailed_balance_report", tests: "populations::tests::detailed_balance_holds_only_in_the_steady_state; acceptance::criterion_6_steady_state" },
    EquationEntry { id: 54, formula: "thermal P_ss(n) = Z^-1 e^{-theta(2n+1)}", module: "populations", operation: "boltzmann_populations", tests: "populations::tests::thermal_steady_state_is_boltzmann; acceptance::criterion_6_steady_state" },
    EquationEntry { id: 55, formula: "Z^-1 = P(0) e^{theta}", module: "populations", operation: "steady_p0_infinite", tests: "populations::tests::partition_normalization_identity" },
    EquationEntry { id: 56, formula: "Z = sum_n e^{-theta(2n+1)} = 1/(2 sinh theta)", module: "populations", operation: "partition_function", tests: "populations::tests::partition_function_converges_to_closed_form" },
    EquationEntry { id: 57, formula: "P_ss(n) = Z^-1 e^{-E_n/kT}, E_n = hbar w (n + 1/2)", module: "populations", operation: "boltzmann_populations", tests: "populations::tests::thermal_steady_state_is_boltzmann; acceptance::criterion_6_steady_state" },
];

/// Render the coverage index as a Markdown table.
pub fn render_markdown() -> String {
    let mut out = String::new();
    out.push_str("# Formula coverage index\n\n");
    out.push_str(
        "Every numbered formula of the implemented model, the module and \
         operation realizing it, and the tests pinning it down. \
         Regenerate with `DLINDBLAD_UPDATE_EQ_INDEX=1 cargo test -p dlindblad-core docs`.\n\n",
    );
    out.push_str("| # | Formula | Module | Operation | Tests |\n");
    out.push_str("|---|---------|--------|-----------|-------|\n");
    for e in EQUATION_INDEX {
        out.push_str(&format!(
            "| {} | `{}` | `{}` | `{}` | {} |\n",
            e.id, e.formula, e.module, e.operation, e.tests
        ));
    }
    out
}
