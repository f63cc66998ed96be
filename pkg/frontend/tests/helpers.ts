export async function until(
  check: () => boolean,
  what = "condition",
  timeout = 10000,
): Promise<void> {
  const start = Date.now();
  while (!check()) {
    if (Date.now() - start > timeout) {
      throw new Error(`timed out waiting for ${what}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 20));
  }
}

export function byTestId<T extends HTMLElement = HTMLElement>(id: string): T {
  const node = document.querySelector<T>(`[data-testid="${id}"]`);
  if (!node) throw new Error(`no element with data-testid=${id}`);
  return node;
}

export function maybeByTestId(id: string): HTMLElement | null {
  return document.querySelector<HTMLElement>(`[data-testid="${id}"]`);
}

export function click(id: string): void {
  byTestId(id).dispatchEvent(new MouseEvent("click", { bubbles: true }));
}

export function setValue(id: string, value: string): void {
  const input = byTestId<HTMLInputElement | HTMLTextAreaElement>(id);
  input.value = value;
}

export function check(id: string, checked = true): void {
  byTestId<HTMLInputElement>(id).checked = checked;
}
