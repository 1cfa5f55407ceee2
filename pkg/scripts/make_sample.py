"""Build the bundled sample conversation export.

Thirty rounds across six themes of an ML-project working session, plus one
bridging round that straddles the attention and training themes. Keyword
density is deliberately high so the offline hash-embedding stack separates
the themes cleanly and the bridge clears the membership threshold for two
topics at once; hash-bucket collisions eat 20-25% of the nominal cosine, so
margins here are generous.
"""

from __future__ import annotations

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "convomap" / "data" / "sample_export.json"

THEMES = {
    "training": [
        (
            "Why does gradient descent diverge when the optimizer takes a large "
            "learning rate? Each gradient step doubles, the optimizer overshoots, "
            "and learning collapses.",
            "Gradient descent multiplies the gradient by the learning rate, so an "
            "oversized learning rate makes the optimizer overshoot and every gradient "
            "grows. Shrink the learning rate, give the optimizer warmup, and clip the "
            "gradient; descent then stays stable and learning resumes.",
        ),
        (
            "Should the optimizer be Adam instead of plain gradient descent, or is a "
            "tuned learning rate schedule enough for this learning run and its "
            "gradient noise?",
            "Adam rescales each gradient by running statistics, so the optimizer "
            "tolerates a rough learning rate. Plain gradient descent with momentum "
            "and a cosine learning rate matches Adam once tuned, but the Adam "
            "optimizer finds a workable descent path with far less learning rate "
            "search and steadier gradient behavior.",
        ),
        (
            "My loss plateaus after three epochs of gradient descent although the "
            "optimizer state and learning rate look healthy; what stalls the "
            "learning and flattens the gradient?",
            "A plateau means the gradient vanished along most directions or the "
            "learning rate decayed too soon. Restart the learning rate schedule, "
            "inspect layers whose gradient is near zero, and let the optimizer take "
            "warm restarts so gradient descent escapes the saddle and learning "
            "continues to descend.",
        ),
        (
            "How does batch size interact with gradient descent, the optimizer "
            "state, and the learning rate? Bigger batches change my gradient noise "
            "and the learning curve.",
            "A bigger batch averages a cleaner gradient, so gradient descent "
            "supports a higher learning rate; the linear scaling rule ties learning "
            "rate to batch size. Hold optimizer momentum fixed, rescale the learning "
            "rate, and track the gradient norm so descent and learning stay matched.",
        ),
        (
            "What does momentum inside the optimizer change about gradient descent? "
            "Does momentum alter what the learning converges to or just the gradient "
            "path of descent?",
            "Momentum accumulates velocity where successive gradient directions "
            "agree, so gradient descent glides through ravines instead of "
            "zigzagging. The optimizer keeps the same minima: momentum reshapes only "
            "the descent path, smoothing learning whenever the gradient is noisy and "
            "the optimizer would otherwise stall.",
        ),
    ],
    "tokenizer": [
        (
            "How large should the subword vocabulary be for a tokenizer trained on "
            "a mixed corpus? The tokenizer sees code and English in one corpus and "
            "the subword vocabulary must cover both.",
            "Sweep the vocabulary size while the tokenizer encodes held-out corpus "
            "text: the tokenizer is sized right when subword compression flattens. A "
            "code-heavy corpus wants a larger subword vocabulary so identifiers stay "
            "whole; thirty-two to fifty thousand subword units fits most corpus "
            "mixes and keeps the tokenizer efficient.",
        ),
        (
            "What does the tokenizer do with out-of-vocabulary words, and how does "
            "a subword vocabulary guarantee the tokenizer covers a brand-new "
            "corpus?",
            "A subword tokenizer backs off to smaller subword pieces and finally "
            "bytes, so no corpus word falls outside the vocabulary. Unseen words "
            "just cost the tokenizer more subword tokens; when the corpus drifts, "
            "retrain the tokenizer or extend the vocabulary and the corpus encodes "
            "compactly again.",
        ),
        (
            "Should the corpus be normalized before the tokenizer runs, or should "
            "the subword vocabulary absorb the raw corpus text as the tokenizer "
            "finds it?",
            "Normalize the corpus lightly: fold odd whitespace and unicode, keep "
            "case when the corpus is code. Train two tokenizer variants, compare "
            "subword fertility on corpus samples, and keep the vocabulary whose "
            "subword units preserve frequent corpus patterns; the tokenizer with "
            "lower subword fertility wins.",
        ),
        (
            "Why did retraining the tokenizer change how identical corpus text "
            "splits into subword tokens, and is the cached vocabulary encoding of "
            "the corpus now stale for that tokenizer?",
            "Retraining reorders the tokenizer merge rules, so the same corpus text "
            "maps to different subword sequences even under an overlapping "
            "vocabulary. Cached token ids bind to the exact tokenizer build: hash "
            "the vocabulary and subword merges, store the hash beside the corpus, "
            "and re-encode when the tokenizer changes.",
        ),
    ],
    "attention": [
        (
            "What do attention heads inside a transformer encoder compute? Walk "
            "through one attention head and how the encoder combines many heads.",
            "Each attention head projects encoder states into queries, keys, and "
            "values, then mixes values by softmax similarity. The transformer runs "
            "its attention heads in parallel and the encoder concatenates them, so "
            "every transformer layer sees several attention patterns over the same "
            "tokens at once.",
        ),
        (
            "How many encoder layers and attention heads does the transformer need "
            "for short documents? Extra heads and encoder depth feel wasted.",
            "Six encoder layers with eight attention heads cover short documents; "
            "many transformer heads end up redundant. Train the larger transformer, "
            "score per-head attention importance, prune weak heads, and distill into "
            "a smaller encoder once accuracy holds; the remaining attention heads "
            "carry the signal.",
        ),
        (
            "Why is attention quadratic in sequence length, and what keeps a "
            "transformer encoder fast when the attention heads face long inputs?",
            "Every attention head scores all token pairs, so the transformer pays "
            "length squared inside each encoder layer. Windowed attention with a few "
            "global heads, or linear attention variants, keeps the encoder near "
            "linear while the transformer preserves most of the attention quality.",
        ),
        (
            "Are attention maps from the transformer encoder interpretable when the "
            "encoder misclassifies? Which attention heads should I inspect first?",
            "Attention maps are a noisy lens: check which tokens each attention head "
            "weights, ablate transformer heads one at a time, and roll attention up "
            "across encoder layers. An attention head stuck on separators means the "
            "transformer leans on positional shortcuts, not content the encoder "
            "should attend to.",
        ),
        (
            "Do relative position encodings help the transformer encoder, and do "
            "all attention heads need them, or only some encoder layers?",
            "Relative encodings let each attention head reason about distance, so "
            "the transformer generalizes past trained lengths. The gain concentrates "
            "in early encoder layers where attention stays local; rotary embeddings "
            "hand every attention head one shared rule and the transformer encoder "
            "drops its position table.",
        ),
    ],
    "deployment": [
        (
            "What is the cleanest docker image layout for the model container "
            "before kubernetes pulls it? The docker image is huge and the container "
            "boots slowly on kubernetes.",
            "Use a multi-stage docker build: compile in a fat builder image, copy "
            "the runtime into a slim container, and pin the base image digest. Keep "
            "weights outside the docker image and mount them, so kubernetes pulls a "
            "small container image and every docker update stays fast.",
        ),
        (
            "How should kubernetes schedule the inference container when traffic "
            "spikes and the docker image pulls slowly onto fresh kubernetes nodes?",
            "Set container resource requests so kubernetes packs pods sensibly and "
            "autoscale on queue depth. Pre-pull the docker image with a daemonset so "
            "each kubernetes node caches the image, and keep a warm container pool; "
            "kubernetes then grows the deployment while the cached image boots new "
            "containers quickly.",
        ),
        (
            "Why does the container behave differently under kubernetes than the "
            "same docker image on my laptop? The image digest matches yet the "
            "container output differs.",
            "The docker image is identical; the environment is not. Kubernetes "
            "injects different variables, enforces CPU limits that throttle the "
            "container, and mounts the image filesystem read-only. Diff docker run "
            "against the kubernetes pod and have the container log its effective "
            "config each time the image boots.",
        ),
        (
            "What belongs inside the docker image versus kubernetes config? "
            "Settings keep leaking into the container image between releases.",
            "The docker image carries code and invariant defaults; kubernetes owns "
            "environment config through maps and secrets injected into the "
            "container. The test: promote one docker image from staging to "
            "production without rebuilding. Needing a rebuild means a setting "
            "leaked into the image that kubernetes should control.",
        ),
        (
            "How do I roll a new model container onto kubernetes without dropping "
            "requests while the docker image warms up and the old container still "
            "serves?",
            "Run a rolling update whose readiness probe passes only after the "
            "container loads weights and serves a warmup batch. Keep max unavailable "
            "at zero so kubernetes holds the old docker image live, then canary the "
            "new image on a thin traffic slice before kubernetes promotes the "
            "container fleet.",
        ),
    ],
    "evaluation": [
        (
            "Which metrics should anchor evaluation when benchmark accuracy looks "
            "strong against the baseline? Headline accuracy on one benchmark feels "
            "thin next to the baseline.",
            "Report per-class accuracy, macro F1, and calibration metrics together; "
            "headline benchmark accuracy hides skew. Run the trivial baseline and "
            "the previous model on the same benchmark, and call a gain real only "
            "when the metrics clear the baseline confidence interval, not when "
            "benchmark accuracy merely ticks up.",
        ),
        (
            "How big must the benchmark grow before a one-point accuracy gap over "
            "the baseline is signal? Our benchmark metrics swing between runs.",
            "Accuracy is a binomial estimate: a thousand benchmark examples give an "
            "interval roughly three points wide, so one accuracy point over the "
            "baseline is noise. Grow the benchmark or bootstrap the paired accuracy "
            "gap; paired metrics tighten quickly because the baseline and the model "
            "share benchmark errors.",
        ),
        (
            "Benchmark accuracy improved but users complain more. Which metrics "
            "does our baseline comparison miss, and is the benchmark itself stale?",
            "The benchmark drifted from live traffic. Add metrics for the slices "
            "users actually hit, compare the baseline and the new model on fresh "
            "production queries, and put retry rate beside accuracy. A model can "
            "raise average benchmark accuracy while losing exactly the slice the "
            "baseline once served well.",
        ),
        (
            "Should adversarial cases enter the main benchmark, or stay outside the "
            "baseline metrics so accuracy remains comparable across benchmark "
            "versions?",
            "Quarantine them: report standard benchmark metrics and an adversarial "
            "suite separately, keeping accuracy comparable with the baseline across "
            "time. Freeze the benchmark version in every report, and when the "
            "benchmark changes, re-run the baseline so the metrics bridge the old "
            "and new benchmark accuracy.",
        ),
        (
            "How do I detect benchmark contamination inflating accuracy before we "
            "publish metrics against the baseline? Training data may contain "
            "benchmark examples verbatim.",
            "Search the training set for near-duplicates of benchmark examples, "
            "then report accuracy on clean and flagged splits; a wide gap between "
            "those metrics is the contamination signature. A held-back canary "
            "benchmark whose accuracy collapses to the baseline confirms the "
            "benchmark leaked into training.",
        ),
    ],
    "labeling": [
        (
            "Our labeling is inconsistent. How do guidelines raise annotator "
            "agreement without biasing the labeling itself or the annotators?",
            "Write guidelines that show rather than tell: each labeling rule gets "
            "positive and negative examples. Run calibration where annotators label "
            "one shared batch, measure agreement, and argue out every disagreement "
            "before real labeling starts. Version the guidelines and watch annotator "
            "agreement after every edit.",
        ),
        (
            "Which agreement statistic should gate the labeling pipeline, and what "
            "agreement threshold says the annotators are ready to label alone?",
            "Use chance-corrected agreement: Cohen's kappa for two annotators, "
            "Krippendorff's alpha for more. Alpha above 0.8 supports trustworthy "
            "labeling; under that, tighten the guidelines and recalibrate the "
            "annotators. Track agreement per class, because annotators agree easily "
            "on the majority labeling and hide the hard classes.",
        ),
        (
            "How many annotators per example is worth the labeling cost, and when "
            "should labeling escalate past the annotators to an expert?",
            "Two annotators plus adjudication on disagreement catches most labeling "
            "noise at sane cost. Escalate when the annotators disagree or mark low "
            "confidence, and log which guidelines section triggered it: that section "
            "is where the labeling agreement is cheapest to improve next.",
        ),
        (
            "Can the model pre-label data for the annotators without anchoring the "
            "labeling or inflating annotator agreement artificially?",
            "Pre-labeling speeds annotators up but anchors them toward the model's "
            "guess. Keep a blind slice the annotators label from scratch and compare "
            "agreement plus label distributions; divergence means the labeling "
            "inherited model bias. Never pre-label classes where the guidelines are "
            "newest or annotator agreement weakest.",
        ),
        (
            "How should labeling treat genuinely ambiguous examples where annotator "
            "agreement stays low no matter how the guidelines read?",
            "Stop forcing one label: let annotators flag ambiguity or collect soft "
            "labeling distributions. Add a worked ambiguity section to the "
            "guidelines, and exclude that subset from the agreement statistic gating "
            "the annotators, tracking it separately so genuine labeling "
            "disagreement stays visible instead of hidden.",
        ),
    ],
}

# Bridge round: saturated in both the attention and training keyword sets and
# nearly free of filler words, so it clears the membership threshold for two
# topics at once.
BRIDGE = (
    "Attention heads versus gradient descent: transformer encoder attention "
    "heads spike gradient norms, the optimizer fights attention heads, learning "
    "rate warmup drags, gradient descent wanders.",
    "Transformer encoder attention heads sharpen the loss surface; gradient "
    "descent needs learning rate warmup. Optimizer damping steadies gradient "
    "descent while attention entropy falls; transformer encoder heads "
    "specialize and learning stabilizes under the optimizer.",
)

# Timeline: themed blocks with returns to earlier threads, the way a working
# session actually wanders.
ORDER = [
    "training", "training", "tokenizer", "tokenizer", "training",
    "attention", "attention", "tokenizer", "attention", "training",
    "deployment", "deployment", "evaluation", "deployment", "evaluation",
    "attention", "BRIDGE", "evaluation", "labeling", "labeling",
    "deployment", "evaluation", "labeling", "tokenizer", "labeling",
    "training", "evaluation", "deployment", "labeling", "attention",
]


def build() -> dict:
    used = {name: 0 for name in THEMES}
    messages = []
    for stop in ORDER:
        if stop == "BRIDGE":
            q, a = BRIDGE
        else:
            q, a = THEMES[stop][used[stop]]
            used[stop] += 1
        messages.append({"role": "user", "content": q})
        messages.append({"role": "assistant", "content": a})
    for name, count in used.items():
        assert count == len(THEMES[name]), (name, count)
    return {"title": "Shipping the classifier: a working session", "messages": messages}


if __name__ == "__main__":
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(build(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")
