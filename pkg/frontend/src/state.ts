import { ApiClient, ApiError } from "./api.js";
import type {
  DetailDraft,
  FinalizeResult,
  ModelDraft,
  Payload,
  PreviewField,
  StepDesc,
} from "./types.js";

export interface InlineError {
  message: string;
  path?: string;
}

/**
 * Wizard view state: the session id, the last accepted server revision,
 * the current step description as the server sent it, and whatever error
 * should be shown inline. One mutation is in flight at a time; the
 * revision token guards against double-submit from a second tab.
 */
export class WizardController {
  sessionId: string | null = null;
  revision = 0;
  step: StepDesc | null = null;
  preview: PreviewField[] = [];
  finalized = false;
  result: FinalizeResult | null = null;
  error: InlineError | null = null;
  notice: string | null = null;
  busy = false;

  onChange: () => void = () => {};

  constructor(readonly api: ApiClient) {}

  private notify(): void {
    this.onChange();
  }

  async create(taxonomyVersion: string): Promise<void> {
    await this.guard(async () => {
      const created = await this.api.createSession(taxonomyVersion);
      this.sessionId = created.session_id;
      this.revision = created.revision;
      this.step = created.step;
      this.finalized = false;
      this.result = null;
    });
  }

  async resume(sessionId: string): Promise<void> {
    await this.guard(async () => {
      const info = await this.api.getSession(sessionId);
      this.sessionId = info.session_id;
      this.revision = info.revision;
      this.step = info.step;
      this.preview = info.preview;
      this.finalized = info.finalized;
    });
  }

  /** Client-side gate derived purely from the schema the server sent. */
  validateDraft(payload: Payload): InlineError | null {
    const schema = this.step?.schema;
    if (!schema) return null;
    if (schema.type === "model-list") {
      const rows = payload as ModelDraft[];
      for (let i = 0; i < rows.length; i++) {
        const row = rows[i]!;
        if (schema.required?.includes("name") && !row.name.trim()) {
          return { message: "every model needs a name", path: `models[${i}].name` };
        }
        if (schema.date_format) {
          for (const date of row.dates_used) {
            if (!/^\d{4}-\d{2}-\d{2}$/.test(date)) {
              return {
                message: `dates use the ${schema.date_format} format`,
                path: `models[${i}].dates_used`,
              };
            }
          }
        }
      }
    }
    if (schema.type === "usage-detail") {
      const draft = payload as DetailDraft;
      if (
        draft.used &&
        schema.required_when_used?.includes("detail") &&
        !(draft.detail ?? "").trim()
      ) {
        return { message: "describe how AI was used here", path: "detail" };
      }
    }
    return null;
  }

  async submit(payload: Payload): Promise<void> {
    const step = this.step;
    if (!this.sessionId || !step) return;
    const inline = this.validateDraft(payload);
    if (inline) {
      this.error = inline;
      this.notify();
      return;
    }
    await this.guard(async () => {
      const param =
        step.category !== undefined
          ? { category: step.category }
          : step.subcategory !== undefined
            ? { subcategory: step.subcategory }
            : undefined;
      const next = await this.api.submitStep(
        this.sessionId!,
        this.revision,
        step.kind,
        payload,
        param,
      );
      this.revision = next.revision;
      this.step = next.step;
    });
  }

  async back(): Promise<void> {
    if (!this.sessionId) return;
    await this.guard(async () => {
      const previous = await this.api.back(this.sessionId!, this.revision);
      this.revision = previous.revision;
      this.step = previous.step;
    });
  }

  async finalizeCard(): Promise<void> {
    if (!this.sessionId) return;
    await this.guard(async () => {
      try {
        this.result = await this.api.finalize(this.sessionId!);
        this.finalized = true;
      } catch (error) {
        if (
          error instanceof ApiError &&
          error.body.code === "incomplete-session" &&
          error.body.revisit_step
        ) {
          // the server names the step that must be fixed; walk back to it
          const missing = error.body.missing ?? [];
          this.notice = missing
            .map((m) => `${m.path}: ${m.message}`)
            .join("\n");
          await this.goToStep(error.body.revisit_step);
          return;
        }
        throw error;
      }
    });
  }

  private async goToStep(kind: string): Promise<void> {
    while (this.step && this.step.kind !== kind && this.step.index > 0) {
      const previous = await this.api.back(this.sessionId!, this.revision);
      this.revision = previous.revision;
      this.step = previous.step;
    }
  }

  async sendEmail(recipient: string): Promise<string> {
    if (!this.result) return "";
    const receipt = await this.api.dispatch(recipient, this.result.card_id);
    return `sent via ${receipt.dispatcher} at ${receipt.dispatched_at}`;
  }

  private async guard(work: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    this.error = null;
    this.notify();
    try {
      await work();
    } catch (error) {
      if (error instanceof ApiError) {
        this.error = { message: error.body.message, path: error.body.path };
        if (error.body.code === "stale-revision" && error.body.revision !== undefined) {
          this.revision = error.body.revision;
        }
      } else {
        this.error = { message: String(error) };
      }
    } finally {
      this.busy = false;
      this.notify();
    }
  }
}
