"""Write the sample instance files under instances/."""

import argparse
import random
from pathlib import Path

from shtukalab import textio
from shtukalab.config import config_for_q
from shtukalab.drinfeld import DrinfeldModule, build_good_model
from shtukalab.generators import break_equivariance, scrambled_pair
from shtukalab.series import BiSeries, RingTag
from shtukalab.shtuka import canonical_pair


def drinfeld(cfg, vals):
    delta = tuple(BiSeries.monomial(cfg, v, 0, 1, cfg.default_pi_prec, RingTag.POLY_L) for v in vals)
    return DrinfeldModule(cfg, delta)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "instances"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    cfg = config_for_q(2, 1, {1: 1})

    carlitz = drinfeld(cfg, [0])
    files = {
        "carlitz.txt": [carlitz],
        "drinfeld_good_n1.txt": [drinfeld(cfg, [-1, -3])],
        "drinfeld_bad_slope.txt": [drinfeld(cfg, [0, -1])],
    }
    model = build_good_model(drinfeld(cfg, [-1, -3]))
    files["pair_carlitz.txt"] = [canonical_pair(build_good_model(carlitz))]
    files["pair_canonical_rank2.txt"] = [canonical_pair(model)]
    scrambled, _ = scrambled_pair(model, rng)
    files["pair_scrambled_rank2.txt"] = [scrambled]
    files["pair_broken.txt"] = [break_equivariance(canonical_pair(model), rng)]

    for name, blocks in files.items():
        textio.dump(textio.InstanceFile(cfg, blocks), out / name)
        print(out / name)


if __name__ == "__main__":
    main()
