#!/usr/bin/env python3
"""How the differential shifts with time since onset for a fixed presentation.

The same findings entered at different hours since the first symptom give
different posteriors, because every causal link strength is a function of
time.  This prints the posterior trajectory for a classic right-lower-
quadrant story, plus the treatment recommendation at each time.
"""

import argparse
import sys

sys.path.insert(0, "src")

import pathdx
from pathdx.decision import recommend
from pathdx.inference import FindingSet, posterior
from pathdx.kb_model import PatientContext

PRESENTATION = {
    "rlq_pain": "present",
    "pain_migration": "present",
    "anorexia": "present",
    "nausea": "present",
    "tenderness_rlq": "present",
    "vomiting": "absent",
    "diarrhea": "absent",
    "dysuria": "absent",
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--age", type=float, default=23.0)
    parser.add_argument("--sex", choices=("male", "female"), default="male")
    parser.add_argument("--hours", default="4,12,24,48,96,132")
    args = parser.parse_args()

    kb = pathdx.load_fixture_kb()
    patient = PatientContext(age=args.age, sex=args.sex)
    hours = [float(h) for h in args.hours.split(",")]

    ids = [d.id for d in kb.diseases]
    print("findings:", ", ".join(f"{s}={v}" for s, v in PRESENTATION.items()))
    print()
    header = f"{'t (h)':>6} " + " ".join(f"{i[:12]:>13}" for i in ids) + f" {'treatment':>14}"
    print(header)
    for t in hours:
        rep = posterior(kb, patient, FindingSet(PRESENTATION, measurement_time=t))
        choice = recommend(rep.posteriors, kb.utilities, threshold_disease=rep.top())
        row = f"{t:>6.0f} " + " ".join(f"{rep.posteriors[i]:>13.4f}" for i in ids)
        print(row + f" {choice.recommendation:>14}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
