"""Hand-built suite specs shared by pass tests and the acceptance suite."""

from tpreach.tpda import load_tpda

# Even-length palindromes with integer time distance between matched letters.
PALINDROME = load_tpda("""
(tpda (input a b) (stack a b) (locations l la lb r ra rb)
  (clocks) (stack-clocks z)
  (max-constant 0) (modulus 1)
  (rule l elapse l)
  (rule r elapse r)
  (rule l eps r)
  (rule l (input a) la)
  (rule la (push a (frac0 z)) l)
  (rule l (input b) lb)
  (rule lb (push b (frac0 z)) l)
  (rule r (input a) ra)
  (rule ra (pop a (frac0 z)) r)
  (rule r (input b) rb)
  (rule rb (pop b (frac0 z)) r))
""")

# Stack-free: one clock, resets, modular + fractional test.
TA_MOD = load_tpda("""
(tpda (input a) (stack) (locations l r)
  (clocks x) (stack-clocks)
  (max-constant 2) (modulus 2)
  (rule l elapse l)
  (rule l (input a) l)
  (rule l (reset x) l)
  (rule l (test (and (mod= x 2 1) (frac0 x))) r)
  (rule r elapse r))
""")

# Stack-free: two clocks with a diagonal integer test (exercises the
# diagonal-removal sub-pass before the fractional lowering).
TA_DIAG = load_tpda("""
(tpda (input a) (stack) (locations l r)
  (clocks x y) (stack-clocks)
  (max-constant 1) (modulus 1)
  (rule l elapse l)
  (rule l (input a) l)
  (rule l (reset x) l)
  (rule l (test (diag<= y x 0)) r)
  (rule r elapse r))
""")

# Stack-free: deterministic two-letter chain, no clock tests.
TA_CHAIN = load_tpda("""
(tpda (input a b) (stack) (locations l m r)
  (clocks) (stack-clocks)
  (max-constant 0) (modulus 1)
  (rule l (input a) m)
  (rule m (input b) r))
""")

# Timed stack with a classical diagonal pop constraint (exercises the
# pop-integer-free machinery: fresh clocks, reset/push guessing).
PD_CLASSIC = load_tpda("""
(tpda (input a) (stack A) (locations l m r)
  (clocks) (stack-clocks z)
  (max-constant 1) (modulus 1)
  (rule l elapse l)
  (rule l (input a) m)
  (rule m (push A (frac0 z)) l)
  (rule l (pop A (and (classic<= z 1) (frac0 z))) r)
  (rule r elapse r))
""")

# Timed stack with diagonal fractional push/pop constraints.
PD_FRAC = load_tpda("""
(tpda (input a) (stack A) (locations l m r)
  (clocks) (stack-clocks z)
  (max-constant 0) (modulus 1)
  (rule l elapse l)
  (rule l (input a) m)
  (rule m (push A (frac-le x0 z)) l)
  (rule l (pop A (frac-le z x0)) r)
  (rule r elapse r))
""")

# Untimed stack (push/pop constraints true).
PD_UNTIMED = load_tpda("""
(tpda (input a b) (stack A) (locations l r)
  (clocks) (stack-clocks z)
  (max-constant 0) (modulus 1)
  (rule l elapse l)
  (rule l (input a) la)
  (rule la (push A true) l)
  (rule l eps r)
  (rule r (input b) rb)
  (rule rb (pop A true) r)
  (rule r elapse r)
  (locations la rb))
""")

SUITE = {
    "palindrome": PALINDROME,
    "ta-mod": TA_MOD,
    "ta-diag": TA_DIAG,
    "ta-chain": TA_CHAIN,
    "pd-classic": PD_CLASSIC,
    "pd-frac": PD_FRAC,
    "pd-untimed": PD_UNTIMED,
}

STACK_FREE = ("ta-mod", "ta-diag", "ta-chain")
