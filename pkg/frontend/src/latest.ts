// At most one search is "live" at a time: every issued request gets a ticket,
// and only the newest ticket's response may touch the DOM. Responses from
// superseded requests are discarded, however late they land.

export class LatestWins {
  private current = 0;

  issue(): number {
    this.current += 1;
    return this.current;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.current;
  }
}
