"""Default prompt templates.

Every template carries exactly one "Task:" line: extraction prompts are
single-purpose on principle (asking for several things at once measurably
degrades output quality), and tests assert that property by inspection.
All templates are plain config-resident text; deployments may override any
of them via the app config.

Placeholders: {material} (synthesis/table generation), {table} and {failure}
(refinement), {response} (reformat reprompt), {incident_report},
{guideline_table} and {n_actions} (plan generation).
"""

DEFAULT_PROMPTS = {
    # Modality queries applied chunk by chunk; the chunk text is appended.
    "decision_tables": (
        "Task: extract every explicit decision rule in the text as a pipe table "
        "with columns Condition | Decision. One rule per row, no commentary."
    ),
    "keypoints": (
        "Task: list the key points and highlights of the text as a pipe table "
        "with columns Point | Detail."
    ),
    "incident_aspects": (
        "Task: list every incident aspect mentioned in the text (incident type, "
        "severity cues, location context) as a pipe table with columns "
        "Aspect | Detail."
    ),
    "response_actions": (
        "Task: list every response action mentioned in the text as a pipe table "
        "with columns Action | Purpose."
    ),
    # Single-fact listing: deliberately never asks for pairing or reasoning.
    "atomic_facts": (
        "Task: list each standalone fact from the text as a pipe table with "
        "columns Fact | Context. One fact per row; never combine two facts in "
        "one row."
    ),
    # Scenario-action pairing: the one template that asks for joint reasoning.
    "cojoint_pairs": (
        "Task: pair each incident scenario in the text with its response "
        "actions as a pipe table with columns Scenario | Actions."
    ),
    "synthesis": (
        "Task: synthesize the following tables into a single coherent pipe "
        "table, merging rows that describe the same item.\n\n{material}"
    ),
    "table_generation": (
        "Task: produce the scenario-action table from the material below. "
        "Output a pipe table with columns Scenario ID | Incident Type | "
        "Severity | Location | Action | Equipment/Technology Required. "
        "Severity must be one of Low, Moderate, High, Very High, Variable.\n\n"
        "{material}"
    ),
    "refine": (
        "Task: refine and filter the scenario-action table below. Drop "
        "duplicate or contradictory rows, keep the same columns, and output "
        "only the table.\n\n{table}"
    ),
    "refine_reprompt": (
        "Task: the scenario-action table below failed validation ({failure}). "
        "Refine and filter it so it validates, keep the same columns, and "
        "output only the table.\n\n{table}"
    ),
    "table_reprompt": (
        "Task: reformat your previous response as a pipe table with a header "
        "row and one row per item.\n\nPrevious response:\n{response}"
    ),
    "plan": (
        "Task: select the response actions for the incident below using the "
        "scenario-action guideline table. Decide for each catalog action, in "
        "catalog order, whether to include it (1) or leave it out (0). Answer "
        "with a single bracketed list of {n_actions} binary digits, e.g. "
        "[1, 0, ...], on the final line after any reasoning.\n\n"
        "Incident report:\n{incident_report}\n\n"
        "Guideline table:\n{guideline_table}"
    ),
    "plan_reprompt": (
        "Task: your previous answer could not be used ({failure}). Answer "
        "again for the same incident with a single bracketed list of "
        "{n_actions} binary digits and nothing after it.\n\n"
        "Incident report:\n{incident_report}\n\n"
        "Guideline table:\n{guideline_table}"
    ),
}
