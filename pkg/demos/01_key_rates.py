"""Walk through a single finite-key evaluation, field by field.

The key-length formula combines four ingredients:

  1. the sampling deviation delta implied by the security parameter and
     the number of test blocks,
  2. the min-entropy bound n_a * (1 - h[(n/n_a)(QX + delta)]) on the
     sieved key,
  3. the error-correction disclosure leak_EC,
  4. a fixed 2*log2(1/eps) extraction cost.

This script evaluates one noiseless point and one noisy point, prints
every intermediate, and shows what optimizing the test size buys.
"""

from qcka_cad import NoiseModel, ProtocolParams, key_length, optimize_m

EPSILON = 1e-36
SIGNALS = 10**7  # total signal count 2N


def show(report, title):
    print(f"--- {title} ---")
    print(f"  parties            : 1 reference + {report.bobs}")
    print(f"  signals (2N)       : {2 * report.half_signals:,}")
    print(f"  test blocks m      : {report.test_size:,}")
    print(f"  key blocks n       : {report.key_blocks:,}")
    print(f"  sampling delta     : {report.delta:.6f}")
    print(f"  X-basis rate QX    : {report.qx:.6f}")
    print(f"  sieve acceptance   : {report.pa:.6f}  (n_a = {report.accepted:,})")
    print(f"  min-entropy bound  : {report.hmin:,.1f} bits")
    print(f"  leak_EC            : {report.leak_ec:,.1f} bits")
    print(f"  key length ell     : {report.ell:,.1f} bits")
    print(f"  rate ell/(2N)      : {report.rate:.6f}")
    print(f"  eps constants      : fail={report.epsilon_fail:.2e} "
          f"PA={report.epsilon_pa:.2e} prime={report.epsilon_prime:.2e}")
    if report.flags:
        print(f"  flags              : {'; '.join(report.flags)}")
    print()


def main():
    half = SIGNALS // 2

    # A noiseless two-party link: everything survives the sieve and the
    # only costs are the sampling slack and the fixed log terms.
    noiseless = NoiseModel(0.0, (0.0,))
    m_star, report = optimize_m(1, half, EPSILON, noiseless)
    show(report, f"noiseless two-party link, optimized m = {m_star:,}")

    # The same link with 8% X noise and matching Z noise.
    noisy = NoiseModel(0.08, (0.08,))
    m_star, report = optimize_m(1, half, EPSILON, noisy)
    show(report, f"8% symmetric noise, optimized m = {m_star:,}")

    # Fixing m badly illustrates why the optimization matters: too small
    # a test leaves a large delta, too large a test wastes key blocks.
    for m in (half // 100, half // 4, 2 * half // 5):
        fixed = key_length(ProtocolParams(1, half, m, EPSILON), noisy)
        print(f"  fixed m = {m:>9,}: delta = {fixed.delta:.5f}  rate = {fixed.rate:.6f}")
    print()

    # Three parties with one noisy and two clean receivers: the sieve
    # suppresses the clean receivers' errors quadratically, so the rate
    # survives asymmetric noise well.
    asym = NoiseModel(0.1, (0.1, 0.025, 0.025))
    m_star, report = optimize_m(3, half, EPSILON, asym)
    show(report, f"asymmetric four-party conference, optimized m = {m_star:,}")


if __name__ == "__main__":
    main()
