"""Generate the frozen end-to-end fixture: 100 trials, 10 topics, qrels.

Run from the repository root:

    python3 tools/gen_fixture.py

Outputs are deterministic and committed under tests/data/; regenerating
must be a no-op unless this script changes.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data"

# One theme per topic: (condition, synonym, drug, extra vocabulary).
THEMES = [
    ("Type 2 Diabetes Mellitus", "Type 2 Diabetes", "metformin",
     "glycemic control HbA1c insulin resistance"),
    ("Asthma", "Persistent Asthma", "albuterol",
     "bronchodilator inhaler wheezing spirometry"),
    ("Ischemic Stroke", "Acute Ischemic Stroke", "alteplase",
     "thrombolysis recanalization NIHSS neurological deficit"),
    ("Breast Cancer", "Early Stage Breast Cancer", "tamoxifen",
     "estrogen receptor adjuvant endocrine therapy"),
    ("Chronic Kidney Disease", "Chronic Renal Insufficiency", "dialysis",
     "eGFR albuminuria nephropathy renal function"),
    ("Hypertension", "Essential Hypertension", "lisinopril",
     "blood pressure systolic diastolic antihypertensive"),
    ("Major Depressive Disorder", "Depression", "sertraline",
     "PHQ-9 antidepressant mood remission"),
    ("Chronic Obstructive Pulmonary Disease", "COPD", "tiotropium",
     "FEV1 exacerbation emphysema smoking"),
    ("Rheumatoid Arthritis", "Seropositive Rheumatoid Arthritis", "methotrexate",
     "synovitis DAS28 joint erosion DMARD"),
    ("Hepatitis C", "Chronic Hepatitis C", "sofosbuvir",
     "genotype sustained virologic response cirrhosis antiviral"),
]

NOTES = [
    "58-year-old male with poorly controlled type 2 diabetes mellitus on "
    "metformin 1000 mg twice daily. HbA1c 9.2 percent. Denies chest pain. "
    "No known cardiac disease.",
    "34-year-old female with persistent asthma using an albuterol rescue "
    "inhaler more than twice weekly. Night-time awakenings. Never smoked.",
    "70-year-old male presenting with acute ischemic stroke, right-sided "
    "weakness, onset 2 hours ago. Received alteplase. Atrial fibrillation "
    "on ECG.",
    "49-year-old female with newly diagnosed estrogen receptor positive "
    "breast cancer, stage II. Considering adjuvant tamoxifen. No prior "
    "chemotherapy.",
    "62-year-old male with stage 4 chronic kidney disease, eGFR 22, not "
    "yet on dialysis. Type 2 diabetes and hypertension.",
    "55-year-old female with resistant hypertension on lisinopril and "
    "amlodipine. Blood pressure 162/98. Denies headache.",
    "41-year-old male with major depressive disorder, PHQ-9 score 18, "
    "failed sertraline. No suicidal ideation.",
    "67-year-old male with severe COPD, FEV1 38 percent predicted, on "
    "tiotropium. Former smoker, 40 pack years.",
    "52-year-old female with seropositive rheumatoid arthritis on "
    "methotrexate with persistent synovitis of both hands.",
    "45-year-old male with chronic hepatitis C genotype 1, treatment "
    "naive, compensated cirrhosis. Considering sofosbuvir therapy.",
]


def make_doc(docno: str, theme_idx: int, j: int) -> dict:
    condition, synonym, drug, extra = THEMES[theme_idx]
    cond_lower = condition.lower()
    neighbor = THEMES[(theme_idx + 1) % len(THEMES)]

    if j <= 2:  # eligible for the matching topic
        arm = ["standard dose", "high dose", "combination"][j]
        return {
            "docno": docno,
            "title": f"{drug.capitalize()} {arm.title()} in {condition}",
            "conditions": [condition, synonym],
            "summary": (
                f"A randomized trial of {arm} {drug} in adults with "
                f"{cond_lower}. Participants receive {drug} or placebo for "
                f"24 weeks with {extra.split()[0]} assessed at each visit."
            ),
            "description": (
                f"This phase 3 study enrolls adults with documented "
                f"{cond_lower}. The primary outcome concerns {extra}. "
                f"Secondary outcomes include quality of life and safety of "
                f"{drug} over 24 weeks."
            ),
            "eligibility": (
                f"Inclusion Criteria: - Adults aged 18 to 80 years with "
                f"{cond_lower} - Stable {drug} therapy or treatment naive "
                f"Exclusion Criteria: - Pregnancy - Severe hepatic impairment"
            ),
            "gender": "All",
            "min_age": "18 Years",
            "max_age": "80 Years",
        }
    if j <= 4:  # on-condition but the patient would be screened out
        variant = (
            "pediatric participants aged 6 to 17 years"
            if j == 3
            else f"participants with no prior exposure to {drug}"
        )
        return {
            "docno": docno,
            "title": f"{condition} Management Study {j - 2}",
            "conditions": [condition],
            "summary": (
                f"An interventional study of {cond_lower} restricted to "
                f"{variant}."
            ),
            "description": (
                f"Evaluates a structured program for {cond_lower}. "
                f"Enrollment is limited to {variant}; others are excluded."
            ),
            "eligibility": (
                f"Inclusion Criteria: - {condition} - Only {variant} "
                f"Exclusion Criteria: - Any other chronic illness"
            ),
            "gender": "All",
            "min_age": "6 Years" if j == 3 else "18 Years",
            "max_age": "17 Years" if j == 3 else "65 Years",
        }
    if j <= 6:  # judged not relevant: neighboring theme focus
        n_cond, n_syn, n_drug, n_extra = neighbor
        return {
            "docno": docno,
            "title": f"{n_drug.capitalize()} Observational Registry {j - 4}",
            "conditions": [n_cond],
            "summary": (
                f"A registry of adults treated for {n_cond.lower()} in "
                f"routine care. No study drug is provided."
            ),
            "description": (
                f"Long-term follow-up of {n_cond.lower()} outcomes; collects "
                f"{n_extra.split()[0]} data annually. Mentions {cond_lower} "
                f"only as a comorbidity."
            ),
            "eligibility": (
                f"Inclusion Criteria: - Diagnosis of {n_cond.lower()} "
                f"Exclusion Criteria: - Inability to consent"
            ),
            "gender": "All",
            "min_age": "18 Years",
            "max_age": None,
        }
    # unjudged filler: healthy volunteers / caregivers / screening
    kind = ["Healthy Volunteer Imaging Study", "Caregiver Burden Survey",
            "Screening Feasibility Pilot"][j - 7]
    return {
        "docno": docno,
        "title": f"{kind} {theme_idx + 1}",
        "conditions": ["Healthy"] if j == 7 else [condition],
        "summary": (
            f"{kind} recruiting from clinics that also manage {cond_lower}."
        ),
        "description": (
            f"A non-interventional {kind.lower()} collecting questionnaires. "
            f"Participants may report a history of {cond_lower} or use of "
            f"{drug}, but treatment is not part of the protocol."
        ),
        "eligibility": (
            "Inclusion Criteria: - Adults able to complete surveys "
            "Exclusion Criteria: - None"
        ),
        "gender": "Female" if j == 8 else "All",
        "min_age": "21 Years",
        "max_age": "90 Years",
    }


def main() -> None:
    rng = random.Random(20260819)
    order = list(range(100))
    rng.shuffle(order)
    docnos = {k: f"NCT{5000000 + 101 * order[k]:08d}" for k in range(100)}

    docs = []
    grades: list[tuple[str, str, int]] = []
    for theme_idx in range(10):
        topic_id = str(theme_idx + 1)
        for j in range(10):
            k = theme_idx * 10 + j
            doc = make_doc(docnos[k], theme_idx, j)
            docs.append(doc)
            if j <= 2:
                # topic 9 keeps only two eligible trials (R = 2)
                if not (theme_idx == 8 and j == 2):
                    grades.append((topic_id, doc["docno"], 2))
                else:
                    grades.append((topic_id, doc["docno"], 1))
            elif j <= 4:
                grades.append((topic_id, doc["docno"], 1))
            elif j <= 6:
                grades.append((topic_id, doc["docno"], 0))

    corpus_path = OUT / "fixture_corpus.jsonl"
    with corpus_path.open("w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, sort_keys=True) + "\n")

    topics_path = OUT / "fixture_topics.xml"
    with topics_path.open("w", encoding="utf-8") as fh:
        fh.write("<topics>\n")
        for i, note in enumerate(NOTES, start=1):
            fh.write(f'  <topic number="{i}">{note}</topic>\n')
        fh.write("</topics>\n")

    qrels_path = OUT / "fixture_qrels.txt"
    with qrels_path.open("w", encoding="utf-8") as fh:
        for topic_id, docno, grade in sorted(
            grades, key=lambda g: (int(g[0]), g[1])
        ):
            fh.write(f"{topic_id} 0 {docno} {grade}\n")

    print(f"wrote {corpus_path} ({len(docs)} docs)")
    print(f"wrote {topics_path} ({len(NOTES)} topics)")
    print(f"wrote {qrels_path} ({len(grades)} judgments)")


if __name__ == "__main__":
    main()
