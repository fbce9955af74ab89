"""
Example runs on the built-in fixtures.

    python examples.py            # all examples
    python examples.py removal    # one example
"""
import sys

from config import Config
from logger import setup_logging


def run_discovery_example():
    """Example: direct and redlining effects on the loan model."""
    from discovery import pse_dd
    from toy_models import loan_case

    print("Discovery on the loan model...")
    print("="*60)

    model, direct, indirect = loan_case()
    report = pse_dd(model, direct, indirect, tau=0.05)

    print(f"SE direct   (c+,c-): {report.se_direct[0]:+.4f}   (c-,c+): {report.se_direct[1]:+.4f}")
    print(f"SE indirect (c+,c-): {report.se_indirect[0]:+.4f}   (c-,c+): {report.se_indirect[1]:+.4f}")
    print(f"Direct discrimination:   {report.judge_direct}")
    print(f"Indirect discrimination: {report.judge_indirect}")


def run_witness_example():
    """Example: an unidentifiable redlining effect and the graph surgery that resolves it."""
    from discovery import pse_dd
    from removal import cut_unidentifiable
    from toy_models import witness_case

    print("Recanting witness example...")
    print("="*60)

    model, direct, indirect = witness_case()
    report = pse_dd(model, direct, indirect)
    print(f"Indirect judgment: {'indeterminate' if report.indeterminate else report.judge_indirect}")
    print(f"Witnesses: {', '.join(sorted(report.witnesses))}")

    surgered, removed = cut_unidentifiable(model, indirect)
    after = pse_dd(surgered, direct, indirect)
    print(f"Cut arcs: {', '.join(f'{a}->{b}' for a, b in sorted(removed))}")
    print(f"SE indirect after surgery: {after.se_indirect}")


def run_removal_example():
    """Example: repair the loan model and regenerate a dataset."""
    from metrics import chi_square_utility
    from dataset import sample_dataset
    from removal import pse_dr
    from toy_models import loan_case

    print("Removal on the loan model...")
    print("="*60)

    model, direct, indirect = loan_case()
    result, data = pse_dr(model, direct, indirect, n=5000, tau=0.05, seed=Config.SEED)
    original = sample_dataset(model, 5000, seed=Config.SEED)

    post = result.post_effects
    print(f"Objective (squared distance): {result.objective_value:.6e}")
    print(f"Solver iterations:            {result.iterations}")
    print(f"SE direct after repair:   {post.se_direct[0]:+.4f} / {post.se_direct[1]:+.4f}")
    print(f"SE indirect after repair: {post.se_indirect[0]:+.4f} / {post.se_indirect[1]:+.4f}")
    print(f"Chi-square vs original sample: {chi_square_utility(original, data):.2f}")

    cpt = result.repaired_model.cpt('Loan')
    print("\nRepaired P(e+ | Race, Zip, Income):")
    for labels, row in cpt.rows():
        print(f"  {','.join(labels):<16} {row[1]:.4f}")


def run_audit_example():
    """Example: audit argmax predictions of the repaired model on held-out rows."""
    from dataset import sample_dataset, split_dataset
    from metrics import predict_and_audit
    from removal import pse_dr
    from toy_models import loan_case

    print("Prediction audit...")
    print("="*60)

    model, direct, indirect = loan_case()
    result, data = pse_dr(model, direct, indirect, n=20000, tau=0.05, seed=Config.SEED)
    _, test = split_dataset(data, test_fraction=0.3, seed=Config.SEED)
    report = predict_and_audit(result, test)
    print(f"Test rows: {len(test)}")
    print(f"Prediction accuracy: {report.accuracy:.1%}")
    print(f"Predictions discriminate: {report.discrimination_found}")


EXAMPLES = {
    'discovery': run_discovery_example,
    'witness': run_witness_example,
    'removal': run_removal_example,
    'audit': run_audit_example,
}


def main(argv=None):
    names = (argv if argv is not None else sys.argv[1:]) or list(EXAMPLES)
    setup_logging('WARNING')
    for name in names:
        if name not in EXAMPLES:
            print(f"Unknown example {name!r}. Choose from: {', '.join(EXAMPLES)}")
            return 1
        EXAMPLES[name]()
        print()
    return 0


if __name__ == '__main__':
    raise SystemExit(main())
