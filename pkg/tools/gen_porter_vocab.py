"""Generate the frozen stemmer-conformance vocabulary.

Emits surface words only (no stems): published rule-example words, a
systematic root-by-suffix grid touching every rewrite rule, clinical
vocabulary with inflections, and seeded random pronounceable strings.
Output is sorted and deduplicated so the frozen file is reviewable.

Usage: python3 tools/gen_porter_vocab.py > tests/data/porter_vocabulary.txt
"""

from __future__ import annotations

import random

RULE_EXAMPLES = """
caresses ponies ties caress cats feed agreed plastered bled motoring
sing conflated troubled sized hopping tanned falling hissing fizzed
failing filing happy sky relational conditional rational valenci
hesitanci digitizer conformabli radicalli differentli vileli
analogousli vietnamization predication operator feudalism decisiveness
hopefulness callousness formaliti sensitiviti sensibiliti triplicate
formative formalize electriciti electrical hopeful goodness revival
allowance inference airliner gyroscopic adjustable defensible irritant
replacement adjustment dependent adoption homologou communism activate
angulariti homologous effective bowdlerize probate rate cease controll
roll generalizations oscillators cement agreement proceed exceed succeed
""".split()

# roots spanning measures 0, 1, 2 and the *o / *d boundary cases
ROOTS = """
tr ee tree t y by sky tray tro tript oy oyl crush real
hop hope rat rate fil file fail feel flee free conn comm
gener oscill rel rol control trouble siz fizz hiss fall tan
motor plaster agre proce sens form deci irrit adopt commun
activ angular homolog effect bowdler electr tripl predic oper
feudal vietnam analog vile differ radic conforma digit hesit
valenc condit nation relat ration deriv deploy iterat annoi
enjoi destroi carri marri studi deni repli appl suppl
""".split()

SUFFIXES = """
s es ss sses ies ied ies y ey ed eed ing ings ation ational tional
enci anci izer bli alli entli eli ousli ization ator alism iveness
fulness ousness aliti iviti biliti logi icate ative alize iciti ical
ful ness al ance ence er ic able ible ant ement ment ent ion ou ism
ate iti ous ive ize e ee l ll
""".split()

CLINICAL = """
patient patients diagnosis diagnoses diagnosed diabetes diabetic
insulin metformin hypertension hypertensive asthma asthmatic copd
cancer cancerous carcinoma tumor tumors malignant malignancy benign
chemotherapy radiation therapy therapies therapeutic treatment
treatments treated treating medication medications prescribed
prescription symptoms symptomatic chronic acute severe severity
moderate mild history historical familial hereditary genetic
screening screened enrollment enrolled eligibility eligible excluded
exclusion inclusion randomized randomization placebo controlled
clinical trials trial study studies studied investigator
investigational intervention interventions dosage doses dosing
administered administration oral intravenous injection injections
baseline followup monitoring monitored assessment assessments
evaluated evaluation evaluations measurement measurements measured
laboratory hemoglobin glucose cholesterol triglycerides creatinine
kidney renal hepatic cardiac cardiovascular pulmonary respiratory
neurological psychiatric depression depressive anxiety disorder
disorders arthritis rheumatoid inflammatory inflammation infection
infections infectious antibiotic antibiotics surgical surgery
pregnancy pregnant lactating breastfeeding contraception smoker
smoking nonsmoker alcohol abuse dependence withdrawal remission
relapse recurrence recurrent metastatic metastases progression
progressive stable stability improvement improved worsening
deteriorated mortality morbidity survival outcomes efficacy safety
tolerability adverse events serious fatigue nausea vomiting headache
dizziness insomnia appetite weight obesity obese overweight
underweight malnutrition deficiency anemia anemic thrombosis
embolism stroke seizure seizures epilepsy migraine fibrillation
arrhythmia ischemia ischemic angina infarction failure transplant
transplantation dialysis biopsy imaging radiographic ultrasound
resonance tomography endoscopy colonoscopy vaccination vaccinated
immunity immunological autoimmune allergy allergic sensitivity
""".split()


def grid() -> list[str]:
    words = []
    for root in ROOTS:
        for suffix in SUFFIXES:
            words.append(root + suffix)
    return words


def random_words(rng: random.Random, count: int) -> list[str]:
    consonants = "bcdfghjklmnpqrstvwz"
    vowels = "aeiouy"
    tails = [""] + SUFFIXES
    out = []
    for _ in range(count):
        n = rng.randint(1, 4)
        word = ""
        for _ in range(n):
            word += rng.choice(consonants) + rng.choice(vowels)
        if rng.random() < 0.5:
            word += rng.choice(consonants)
        word += rng.choice(tails)
        if rng.random() < 0.2:
            word += rng.choice(tails)
        out.append(word)
    return out


def main() -> None:
    rng = random.Random(118999)
    words = set(RULE_EXAMPLES) | set(ROOTS) | set(CLINICAL)
    words.update(grid())
    words.update(random_words(rng, 4000))
    words = {w for w in words if w and w.isalpha() and w == w.lower()}
    for w in sorted(words):
        print(w)


if __name__ == "__main__":
    main()
