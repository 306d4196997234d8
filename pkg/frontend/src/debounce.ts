/** Trailing-edge debounce: the callback runs once per quiet period with the
 * most recent argument.  `flush` fires a pending call immediately; `cancel`
 * drops it. */

export interface Debounced<T> {
  (arg: T): void;
  flush(): void;
  cancel(): void;
  pending(): boolean;
}

export function debounce<T>(fn: (arg: T) => void, waitMs: number): Debounced<T> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let lastArg: T;

  const wrapped = ((arg: T) => {
    lastArg = arg;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      fn(lastArg);
    }, waitMs);
  }) as Debounced<T>;

  wrapped.flush = () => {
    if (timer === null) return;
    clearTimeout(timer);
    timer = null;
    fn(lastArg);
  };
  wrapped.cancel = () => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
  };
  wrapped.pending = () => timer !== null;
  return wrapped;
}
