#!/usr/bin/env python3
"""Writes the golden input tables into input/.

Deterministic for a given seed. Run oracle.py afterwards to refresh expected/.
The pipeline is meant to run over these files with top_k=4: five languages
appear, and haskell has the fewest projects so it falls out.
"""
import os
import random
import sys

SEED = 20200417
HERE = os.path.dirname(os.path.abspath(__file__))

SPELLINGS = {
    "java": ["Java", "JAVA", "java"],
    "python": ["Python", "python", "python3"],
    "go": ["Go", "Golang", "go"],
    "javascript": ["JavaScript", "js", "JS"],
}
YEARS = [2014, 2015, 2016, 2017, 2018]


def csv_line(fields):
    out = []
    for f in fields:
        s = "" if f is None else str(f)
        if "," in s or '"' in s:
            s = '"' + s.replace('"', '""') + '"'
        out.append(s)
    return ",".join(out)


def iso(rng, year):
    return "%04d-%02d-%02dT%02d:%02d:%02dZ" % (
        year, rng.randint(1, 12), rng.randint(1, 28), rng.randint(0, 23), rng.randint(0, 59), rng.randint(0, 59))


def write(name, header, rows, raw_lines=()):
    path = os.path.join(HERE, "input", name)
    with open(path, "w", newline="") as f:
        if header:
            f.write(",".join(header) + "\n")
        for r in rows:
            f.write((r if isinstance(r, str) else csv_line(r)) + "\n")
        for line in raw_lines:
            f.write(line + "\n")


def main():
    rng = random.Random(SEED)
    os.makedirs(os.path.join(HERE, "input"), exist_ok=True)
    users = list(range(1, 13))

    # projects: 36 clean rows plus dirty ones
    projects = []
    langs = []
    for pid in range(1, 37):
        lang = rng.choice(list(SPELLINGS))
        langs.append(lang)
        projects.append([pid, rng.choice(users + [None]), rng.choice(SPELLINGS[lang]), rng.choice(YEARS)])
    projects.append([37, 3, "Haskell", 2016])
    projects.append([5, 4, "Python", 2015])          # duplicate id, later row ignored
    projects.append([38, 2, None, 2016])             # null language
    projects.append([39, 2, "Java", 1999])           # out of range year
    projects.append([40, "\\N", "js", 2017])         # null owner marker
    write("projects.csv", ["id", "owner_id", "language", "year"], projects, ["41,2,Java"])

    # commits split over two files; project 999 does not exist
    commits = []
    for cid in range(1, 61):
        commits.append([cid, rng.choice(users), rng.choice(users), rng.randint(1, 40), rng.choice(YEARS)])
    commits.append([61, 3, 3, 999, 2016])
    commits.append([62, 3, 3, 999, 2017])
    commits.append([63, None, 4, 7, 2015])
    commits.append([64, 5, 5, None, 2016])           # null project
    commits.append([65, 5, 5, 8, 1970])              # garbage year
    write("commits_part1.csv", ["id", "author_id", "committer_id", "project_id", "year"], commits[:33])
    write("commits_part2.csv", None, commits[33:], ["66,5,5,x9,2016"])

    # pull requests on a few base repos; 120 has no opened event, 121 targets an unknown repo
    prs = []
    for i in range(16):
        base = rng.randint(1, 37)
        prs.append([100 + i, rng.randint(1, 40), base, rng.randint(1000, 2000), rng.randint(1000, 2000), i + 1])
    prs.append([120, 3, 4, None, None, 17])
    prs.append([121, 3, 500, None, None, 18])
    prs.append([100, 9, 9, None, None, 19])          # duplicate id, first wins
    prs.append([122, 3, None, None, None, 20])       # null base repo
    write("pull_requests.csv", ["id", "head_repo_id", "base_repo_id", "head_commit_id", "base_commit_id",
                                "pull_request_id"], prs)

    history = []
    hid = 5000
    for i in range(16):
        pr = 100 + i
        year = rng.choice(YEARS[:-1])
        history.append([hid, pr, rng.choice(["opened", "Opened", "OPENED"]), rng.choice(users), year]); hid += 1
        if rng.random() < 0.5:
            history.append([hid, pr, "closed", rng.choice(users), year]); hid += 1
        if rng.random() < 0.3:
            history.append([hid, pr, "reopened", rng.choice(users), year + 1]); hid += 1
            history.append([hid, pr, "opened", rng.choice(users), year + 1]); hid += 1
        if rng.random() < 0.3:
            history.append([hid, pr, "synchronize", rng.choice(users), year]); hid += 1
    history.append([hid, 121, "opened", 2, 2016]); hid += 1
    history.append([hid, 120, "merged", 2, 2016]); hid += 1
    history.append([hid, 999, "opened", 2, 2016]); hid += 1
    history.append([hid, 101, "opened", 2, 2030]); hid += 1
    write("pull_request_history.csv", ["id", "pull_request_id", "action", "actor_id", "year"], history)

    # issues and their events
    issues = []
    for i in range(18):
        issues.append([300 + i, rng.randint(1, 37), i, rng.choice(YEARS)])
    issues.append([318, 777, 18, 2016])            # unknown repo
    issues.append([319, 3, 19, 1970])              # garbage year
    issues.append([300, 4, 20, 2015])              # duplicate id
    write("issues.csv", ["id", "repo_id", "issue_id", "year"], issues)

    events = []
    eid = 9000
    for i in range(18):
        issue = 300 + i
        pattern = rng.choice(["none", "closed", "closed", "reopened", "reclosed", "chatter"])
        base = rng.choice(YEARS[:-1])
        if pattern in ("closed", "reopened", "reclosed"):
            events.append([eid, issue, rng.choice(["closed", "Closed"]), base]); eid += 1
        if pattern in ("reopened", "reclosed"):
            events.append([eid, issue, "reopened", iso(rng, base + 1)]); eid += 1
        if pattern == "reclosed":
            events.append([eid, issue, "closed", base + 1 if rng.random() < 0.5 else iso(rng, base + 1)]); eid += 1
        if pattern in ("chatter", "none") and rng.random() < 0.5:
            events.append([eid, issue, rng.choice(["referenced", "subscribed", "head_ref_deleted"]), base]); eid += 1
    # same year, no timestamps: event ids decide; a null id sorts first
    events.append([eid, 301, "closed", 2019]); eid += 1
    events.append([None, 301, "reopened", 2019])
    events.append([eid, 302, "reopened", 1999]); eid += 1
    write("issue_events.csv", ["event_id", "issue_id", "action", "year"], events, ["9999,303"])

    # StackOverflow posts: timestamps for most, a bare year for a few
    tags_pool = ["<java>", "<python>", "<go>", "<javascript>", "<java><spring>", "<python><pandas>",
                 "<golang>", "<js><node.js>", "<java><python>", "<javascript><python><go>", "java", "python",
                 "<haskell>", "<pandas>"]
    posts = []
    question_times = {}
    for i in range(96):
        qid = 10000 + i
        year = rng.choice(YEARS)
        created = iso(rng, year) if rng.random() < 0.85 else str(year)
        if created.endswith("Z") and rng.random() < 0.1:
            created = created[:-1] + "+05:30"
        answers = rng.choice([0, 0, 1, 1, 2, 3, 5])
        posts.append([qid, rng.randint(20, 45), 1, rng.randint(-5, 12), rng.choice(tags_pool), created, answers])
        question_times[qid] = created
    posts.append([10096, 21, 2, 4, "<java>", "2016-03-03T10:00:00Z", 0])   # an answer post
    posts.append([10097, None, 1, 4, "<java>", "2016-03-03T10:00:00Z", 0])  # no owner
    posts.append([10098, 22, 1, 4, "<go>", "2003-03-03T10:00:00Z", 1])      # too early
    posts.append([10099, 22, None, 4, "<c++><c>", "2016-03-03T10:00:00Z", 1])
    write("posts.csv", ["_Id", "_OwnerUserId", "_PostTypeId", "_Score", "_Tag", "_CreationYear", "_AnswerCount"], posts)

    # answer links: 30, mostly to timestamped questions
    timed = sorted(q for q, t in question_times.items() if "T" in t)
    links = []
    for i in range(30):
        if i < 27:
            q = rng.choice(timed)
            year = int(question_times[q][:4])
            links.append([50000 + i, q, iso(rng, min(year + rng.choice([0, 0, 0, 1]), 2019))])
        else:
            links.append([50000 + i, rng.choice([10003, 77777]), "2017-05-05T05:05:05Z"])
    write("answers.csv", ["answer_id", "question_id", "creation_time"], links)
    return 0


if __name__ == "__main__":
    sys.exit(main())
