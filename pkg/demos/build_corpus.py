"""Regenerate the bundled example graphs and policy files under src/sgpid/corpus."""

from __future__ import annotations

import json
from pathlib import Path

from sgpid.graph_core import graph_from_text, graph_to_dict, induced_subgraph, relatives
from sgpid.intervention import (
    ConstMechanism,
    ParamMechanism,
    Policy,
    PolicySet,
    apply_procedure,
    policy_set_to_json,
)
from sgpid.projection import decompose

OUT = Path(__file__).resolve().parent.parent / "src" / "sgpid" / "corpus"

FIG1_SHARED = (
    "C_l->A_l, C_l->A_r, C_r->A_r, C_r->A_l, A_l->Y_l, A_l->Y_r, A_r->Y_l, A_r->Y_r, "
    "C_l->Y_l, C_l->Y_r, C_r->Y_l, C_r->Y_r"
)
FIG2A = (
    "C1->A1, A1->M1, M1->Y1, C2->A2, A2->M2, M2->Y2, C2->M2, C2->Y2, C3->A3, A3->M3, M3->Y3, "
    "Y2<->Y3, A1->Y1, A1<->Y1, A2<->Y2, C1<->Y1, M1--M2, M2--M3, C2--C3, C2->M3"
)


def three_unit_policies() -> PolicySet:
    return PolicySet(
        [
            Policy("A1", ["C2"], ParamMechanism("f_A1")),
            Policy("A2", ["C2", "C3", "A3"], ParamMechanism("f_A2")),
            Policy("A3", ["A2", "C3"], ParamMechanism("f_A3")),
            Policy("M2", ["A2", "C2", "M3"], ParamMechanism("f_M2")),
        ]
    )


def main() -> None:
    graphs = {
        "elections_lv": graph_from_text(
            FIG1_SHARED + ", H_l->C_l, H_l->A_l, H_r->C_r, H_r->A_r, Y_l--Y_r", latent=["H_l", "H_r"]
        ),
        "elections_sg": graph_from_text(FIG1_SHARED + ", C_l<->A_l, C_r<->A_r, Y_l--Y_r"),
        "elections_cg": graph_from_text(FIG1_SHARED + ", A_l--A_r"),
        "three_unit": graph_from_text(FIG2A),
        "frontdoor": graph_from_text("C2->A2, A2->M2, M2->Y2, C2->M2, C2->Y2, A2<->Y2"),
        "bow": graph_from_text("C1->A1, A1->M1, M1->Y1, A1->Y1, A1<->Y1, C1<->Y1"),
    }
    dec = decompose(graphs["three_unit"])
    graphs["three_unit_cg"] = dec.ccg
    graphs["three_unit_admg"] = dec.cadmg
    post = apply_procedure(graphs["three_unit"], three_unit_policies())
    graphs["three_unit_post"] = post
    y_star = relatives(post, {"Y2", "Y3"}, "anterior") - three_unit_policies().targets
    graphs["three_unit_ystar"] = induced_subgraph(post, y_star)
    policies = {
        "three_unit_policies": three_unit_policies(),
        "elections_policy": PolicySet([Policy("A_l", ["C_l", "C_r"], ParamMechanism("f_A_l"))]),
        "frontdoor_do": PolicySet([Policy("A2", [], ConstMechanism(1))]),
    }
    OUT.mkdir(parents=True, exist_ok=True)
    for name, g in graphs.items():
        (OUT / f"{name}.json").write_text(json.dumps(graph_to_dict(g), indent=2) + "\n")
    for name, ps in policies.items():
        (OUT / f"{name}.policy.json").write_text(json.dumps(policy_set_to_json(ps), indent=2) + "\n")


if __name__ == "__main__":
    main()
