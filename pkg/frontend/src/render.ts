import type { WizardController } from "./state.js";
import type {
  CorrespondenceDraft,
  DetailDraft,
  ModelChoice,
  ModelDraft,
  Payload,
  ProjectDraft,
  StepDesc,
  StepOption,
  TextField,
} from "./types.js";

type Attrs = Record<string, string | boolean | ((event: Event) => void)>;

function el(
  tag: string,
  attrs: Attrs = {},
  children: (Node | string)[] = [],
): HTMLElement {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (typeof value === "function") {
      node.addEventListener(key.replace(/^on/, ""), value);
    } else if (typeof value === "boolean") {
      if (value) node.setAttribute(key, "");
      if (key === "checked") (node as HTMLInputElement).checked = value;
    } else {
      node.setAttribute(key, value);
      if (key === "value" && node instanceof HTMLTextAreaElement) {
        node.value = value;
      }
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

function checkboxList(
  options: StepOption[],
  checkedIds: Set<string>,
  prefix: string,
): HTMLElement {
  return el(
    "ul",
    { class: "options" },
    options.map((option) =>
      el("li", {}, [
        el("label", {}, [
          el("input", {
            type: "checkbox",
            value: option.id,
            "data-testid": `${prefix}-${option.id}`,
            checked: checkedIds.has(option.id),
          }),
          el("span", { class: "option-title" }, [option.title]),
          ...(option.description
            ? [el("small", { class: "option-description" }, [option.description])]
            : []),
        ]),
      ]),
    ),
  );
}

function checkedValues(container: HTMLElement, selector: string): string[] {
  return Array.from(
    container.querySelectorAll<HTMLInputElement>(`${selector}:checked`),
  ).map((input) => input.value);
}

// -- per-step renderers -----------------------------------------------------

function modelInfoForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const current = (step.current as ModelDraft[] | null) ?? [];
  const rows = el("div", { "data-testid": "model-rows" });

  const addRow = (draft?: ModelDraft): void => {
    const index = rows.children.length;
    rows.append(
      el("fieldset", { class: "model-row" }, [
        el("label", {}, [
          "Name",
          el("input", {
            type: "text",
            "data-field": "name",
            "data-testid": `model-name-${index}`,
            value: draft?.name ?? "",
          }),
        ]),
        el("label", {}, [
          "Dates used (comma separated)",
          el("input", {
            type: "text",
            "data-field": "dates",
            "data-testid": `model-dates-${index}`,
            value: (draft?.dates_used ?? []).join(", "),
            placeholder: step.schema.date_format ?? "",
          }),
        ]),
        el("label", {}, [
          "Version (optional)",
          el("input", {
            type: "text",
            "data-field": "version",
            "data-testid": `model-version-${index}`,
            value: draft?.version ?? "",
          }),
        ]),
        el(
          "button",
          {
            type: "button",
            class: "remove",
            onclick: (event) => {
              (event.target as HTMLElement).closest("fieldset")?.remove();
            },
          },
          ["Remove"],
        ),
      ]),
    );
  };
  current.forEach((draft) => addRow(draft));
  const node = el("div", {}, [
    rows,
    el(
      "button",
      {
        type: "button",
        "data-testid": "add-model",
        onclick: () => addRow(),
      },
      ["Add a model"],
    ),
  ]);
  const collect = (): Payload =>
    Array.from(rows.querySelectorAll("fieldset")).map((row) => {
      const input = (field: string): string =>
        row.querySelector<HTMLInputElement>(`input[data-field="${field}"]`)
          ?.value ?? "";
      const version = input("version").trim();
      return {
        name: input("name"),
        dates_used: input("dates")
          .split(",")
          .map((date) => date.trim())
          .filter(Boolean),
        version: version ? version : null,
      };
    });
  return { node, collect };
}

function multiSelectForm(
  step: StepDesc,
  prefix = "option",
): { node: HTMLElement; collect: () => Payload } {
  const current = new Set((step.current as string[] | null) ?? []);
  const node = checkboxList(step.schema.options ?? [], current, prefix);
  return {
    node,
    collect: () => checkedValues(node, "input[type=checkbox]"),
  };
}

function assignmentForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const models = step.schema.models ?? [];
  const options = step.schema.options ?? [];
  const current = (step.current as string[][] | null) ?? [];
  const node = el(
    "div",
    {},
    models.map((model: ModelChoice) => {
      const checked = new Set(current[model.index] ?? []);
      return el("fieldset", { class: "assignment", "data-model": String(model.index) }, [
        el("legend", {}, [`Where was ${model.name} used?`]),
        el(
          "ul",
          { class: "options" },
          options.map((option) =>
            el("li", {}, [
              el("label", {}, [
                el("input", {
                  type: "checkbox",
                  value: option.id,
                  "data-testid": `assign-${model.index}-${option.id}`,
                  checked: checked.has(option.id),
                }),
                el("span", {}, [option.title]),
              ]),
            ]),
          ),
        ),
      ]);
    }),
  );
  const collect = (): Payload =>
    models.map((model) => {
      const fieldset = node.querySelector(
        `fieldset[data-model="${model.index}"]`,
      ) as HTMLElement;
      return checkedValues(fieldset, "input[type=checkbox]");
    });
  return { node, collect };
}

function detailForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const schema = step.schema;
  const current = (step.current as DetailDraft | null) ?? { used: true };
  const allowed = schema.allowed_classifications ?? [];
  const selected = new Set(
    current.classifications ?? (allowed.length === 1 ? allowed : []),
  );
  const defaultRefs = new Set(current.model_refs ?? schema.default_models ?? []);

  const chips = el(
    "div",
    { class: "chips", role: "group" },
    allowed.map((name) =>
      el(
        "button",
        {
          type: "button",
          class: "chip",
          "data-testid": `chip-${name}`,
          "aria-pressed": selected.has(name) ? "true" : "false",
          onclick: (event) => {
            const chip = event.currentTarget as HTMLElement;
            const pressed = chip.getAttribute("aria-pressed") === "true";
            chip.setAttribute("aria-pressed", pressed ? "false" : "true");
          },
        },
        [name],
      ),
    ),
  );
  const usedBox = el("input", {
    type: "checkbox",
    "data-testid": "detail-used",
    checked: current.used,
  }) as HTMLInputElement;
  const detailText = el("textarea", {
    "data-testid": "detail-text",
    rows: "3",
    value: current.detail ?? "",
  }) as HTMLTextAreaElement;
  const models = schema.models ?? [];
  const refsList = el(
    "ul",
    { class: "options" },
    models.map((model) =>
      el("li", {}, [
        el("label", {}, [
          el("input", {
            type: "checkbox",
            value: String(model.index),
            "data-testid": `detail-model-${model.index}`,
            checked: defaultRefs.has(model.index),
          }),
          el("span", {}, [model.name]),
        ]),
      ]),
    ),
  );
  const node = el("div", {}, [
    ...(schema.subcategory?.description
      ? [el("p", { class: "option-description" }, [schema.subcategory.description])]
      : []),
    el("label", { class: "inline" }, [usedBox, "AI was used for this activity"]),
    el("div", { class: "detail-body" }, [
      el("p", {}, ["How did it contribute?"]),
      chips,
      el("label", {}, ["Details", detailText]),
      ...(models.length
        ? [el("p", {}, ["Which models?"]), refsList]
        : []),
    ]),
  ]);
  const collect = (): Payload => {
    if (!usedBox.checked) {
      return { used: false };
    }
    return {
      used: true,
      classifications: Array.from(
        chips.querySelectorAll('button[aria-pressed="true"]'),
      ).map((chip) => chip.textContent ?? ""),
      model_refs: checkedValues(refsList, "input[type=checkbox]").map(Number),
      detail: detailText.value,
    };
  };
  return { node, collect };
}

function ethicsForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const fields = (step.schema.fields ?? []) as TextField[];
  const current = (step.current as Record<string, string> | null) ?? {};
  const node = el(
    "div",
    {},
    fields.map((field) =>
      el("label", { class: "ethics-question" }, [
        field.title,
        el("textarea", {
          rows: "3",
          "data-key": field.key,
          "data-testid": `ethics-${field.key}`,
          value: current[field.key] ?? "",
        }),
      ]),
    ),
  );
  const collect = (): Payload => {
    const payload: Record<string, string> = {};
    node.querySelectorAll<HTMLTextAreaElement>("textarea").forEach((area) => {
      payload[area.dataset["key"]!] = area.value;
    });
    return payload;
  };
  return { node, collect };
}

function approvalForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const box = el("input", {
    type: "checkbox",
    "data-testid": "approval-box",
    checked: step.current === true,
  }) as HTMLInputElement;
  const node = el("label", { class: "inline" }, [
    box,
    step.schema.title ?? "The authors approve the AI-generated content",
  ]);
  return { node, collect: () => box.checked };
}

function projectForm(step: StepDesc): {
  node: HTMLElement;
  collect: () => Payload;
} {
  const current = (step.current as ProjectDraft | null) ?? {
    correspondences: [],
    project_name: "",
    key_applications: [],
  };
  const rows = el("div", { "data-testid": "correspondence-rows" });
  const addRow = (draft?: CorrespondenceDraft): void => {
    const index = rows.children.length;
    rows.append(
      el("fieldset", { class: "correspondence-row" }, [
        el("label", {}, [
          "Name",
          el("input", {
            type: "text",
            "data-field": "name",
            "data-testid": `corr-name-${index}`,
            value: draft?.name ?? "",
          }),
        ]),
        el("label", {}, [
          "Contact",
          el("input", {
            type: "text",
            "data-field": "contact",
            "data-testid": `corr-contact-${index}`,
            value: draft?.contact ?? "",
          }),
        ]),
        el("label", {}, [
          "Affiliation",
          el("input", {
            type: "text",
            "data-field": "affiliation",
            "data-testid": `corr-affiliation-${index}`,
            value: draft?.affiliation ?? "",
          }),
        ]),
        el(
          "button",
          {
            type: "button",
            class: "remove",
            onclick: (event) => {
              (event.target as HTMLElement).closest("fieldset")?.remove();
            },
          },
          ["Remove"],
        ),
      ]),
    );
  };
  current.correspondences.forEach((draft) => addRow(draft));
  if (!current.correspondences.length) addRow();

  const projectName = el("input", {
    type: "text",
    "data-testid": "project-name",
    value: current.project_name,
  }) as HTMLInputElement;
  const applications = el("input", {
    type: "text",
    "data-testid": "key-applications",
    value: current.key_applications.join(", "),
  }) as HTMLInputElement;

  const node = el("div", {}, [
    el("h3", {}, ["Correspondence(s)"]),
    rows,
    el(
      "button",
      {
        type: "button",
        "data-testid": "add-correspondence",
        onclick: () => addRow(),
      },
      ["Add a correspondence"],
    ),
    el("label", {}, ["Project name", projectName]),
    el("label", {}, ["Key applications (comma separated)", applications]),
  ]);
  const collect = (): Payload => ({
    correspondences: Array.from(rows.querySelectorAll("fieldset")).map((row) => {
      const input = (field: string): string =>
        row.querySelector<HTMLInputElement>(`input[data-field="${field}"]`)
          ?.value ?? "";
      return {
        name: input("name"),
        contact: input("contact"),
        affiliation: input("affiliation"),
      };
    }),
    project_name: projectName.value,
    key_applications: applications.value
      .split(",")
      .map((value) => value.trim())
      .filter(Boolean),
  });
  return { node, collect };
}

// -- review and result ---------------------------------------------------------

function previewList(fields: { label: string; value: string }[]): HTMLElement {
  return el(
    "dl",
    { class: "preview", "data-testid": "preview" },
    fields.flatMap((field) => [
      el("dt", {}, [field.label]),
      el("dd", {}, [field.value]),
    ]),
  );
}

function reviewPanel(controller: WizardController, step: StepDesc): HTMLElement {
  return el("div", {}, [
    previewList(step.preview ?? []),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        "data-testid": "finalize",
        onclick: () => void controller.finalizeCard(),
      },
      ["Finalize this card"],
    ),
  ]);
}

function resultPanel(controller: WizardController): HTMLElement {
  const result = controller.result!;
  const verdict = result.responsible
    ? "Responsible: all three dimensions are satisfied."
    : "Not responsible yet: see the findings below.";
  const email = el("input", {
    type: "email",
    placeholder: "you@example.org",
    "data-testid": "email",
  }) as HTMLInputElement;
  const receipt = el("p", { "data-testid": "receipt" });
  return el("div", { class: "result" }, [
    el(
      "p",
      {
        class: result.responsible ? "verdict ok" : "verdict bad",
        "data-testid": "verdict",
      },
      [verdict],
    ),
    el(
      "ul",
      { class: "dimensions" },
      result.report.dimensions.map((dimension) =>
        el("li", {}, [
          `${dimension.dimension}: ${dimension.satisfied ? "satisfied" : "not satisfied"}`,
          ...(dimension.findings.length
            ? [
                el(
                  "ul",
                  {},
                  dimension.findings.map((finding) =>
                    el("li", {}, [
                      `[${finding.severity}] ${finding.code} at ${finding.path}: ${finding.message}`,
                    ]),
                  ),
                ),
              ]
            : []),
        ]),
      ),
    ),
    el("h3", {}, ["Downloads"]),
    el(
      "ul",
      { class: "downloads" },
      Object.entries(result.links).map(([name, href]) =>
        el("li", {}, [
          el("a", { href, download: true, "data-testid": `link-${name}` }, [
            `card.${name}`,
          ]),
        ]),
      ),
    ),
    el("h3", {}, ["Email the card"]),
    el("div", { class: "email-row" }, [
      email,
      el(
        "button",
        {
          type: "button",
          "data-testid": "send-email",
          onclick: () => {
            void controller.sendEmail(email.value).then((text) => {
              receipt.textContent = text;
            });
          },
        },
        ["Send"],
      ),
    ]),
    receipt,
  ]);
}

// -- top level -------------------------------------------------------------------

const FORMS: Record<
  string,
  (step: StepDesc) => { node: HTMLElement; collect: () => Payload }
> = {
  "model-list": modelInfoForm,
  assignment: assignmentForm,
  "usage-detail": detailForm,
  texts: ethicsForm,
  affirmation: approvalForm,
  project: projectForm,
};

function startScreen(controller: WizardController): HTMLElement {
  const version = el("input", {
    type: "text",
    value: "1.0",
    "data-testid": "start-version",
  }) as HTMLInputElement;
  return el("div", { class: "card start" }, [
    el("h2", {}, ["Report your AI usage"]),
    el("p", {}, [
      "Answer a short questionnaire and get a standardized AI Usage Card " +
        "in five machine-readable formats.",
    ]),
    el("label", {}, ["Card structure version", version]),
    el(
      "button",
      {
        type: "button",
        class: "primary",
        "data-testid": "start-button",
        onclick: () => void controller.create(version.value),
      },
      ["Start"],
    ),
  ]);
}

export function renderApp(root: HTMLElement, controller: WizardController): void {
  root.replaceChildren();
  const header = el("header", {}, [
    el("h1", {}, ["AI Usage Cards"]),
    el("p", { class: "tagline" }, [
      "Document where and how AI assisted your work.",
    ]),
  ]);
  root.append(header);

  if (!controller.sessionId) {
    root.append(startScreen(controller));
    return;
  }
  const main = el("div", { class: "card" });
  root.append(main);

  if (controller.error) {
    const text = controller.error.path
      ? `${controller.error.path}: ${controller.error.message}`
      : controller.error.message;
    main.append(el("p", { class: "error", "data-testid": "error" }, [text]));
  }
  if (controller.notice) {
    main.append(
      el("pre", { class: "notice", "data-testid": "notice" }, [controller.notice]),
    );
    controller.notice = null;
  }

  if (controller.finalized && controller.result) {
    main.append(resultPanel(controller));
    return;
  }
  if (controller.finalized) {
    main.append(el("p", {}, ["This session is finalized."]));
    return;
  }
  const step = controller.step;
  if (!step) return;

  main.append(el("h2", { "data-testid": "prompt" }, [step.prompt]));

  if (step.kind === "review") {
    main.append(reviewPanel(controller, step));
  } else {
    const maker = FORMS[step.schema.type] ?? multiSelectForm;
    const form = maker(step);
    main.append(form.node);
    main.append(
      el(
        "button",
        {
          type: "button",
          class: "primary",
          "data-testid": "submit",
          disabled: controller.busy,
          onclick: () => void controller.submit(form.collect()),
        },
        ["Continue"],
      ),
    );
  }
  if (step.index > 0) {
    main.append(
      el(
        "button",
        {
          type: "button",
          class: "ghost",
          "data-testid": "back",
          disabled: controller.busy,
          onclick: () => void controller.back(),
        },
        ["Back"],
      ),
    );
  }
}
